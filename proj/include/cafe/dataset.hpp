#pragma once

#include <string>
#include <vector>

#include "cafe/linalg.hpp"
#include "cafe/rng.hpp"

namespace cafe {

struct Dataset {
  int feature_dim = 0;
  int num_classes = 0;
  Matrix features;  // one sample per row
  std::vector<int> labels;

  int size() const { return features.rows; }
};

struct TrainTest {
  Dataset train;
  Dataset test;
};

// Gaussian mixture task: one unit-variance spherical component per class,
// means placed pairwise equidistant (centered simplex scaled so any two
// means sit `separation` apart). Per class, the train split holds
// 5/6 * per_class samples scaled by decay^class (the long-tail knob); the
// test split holds per_class/6 samples for every class, so long-tail runs
// are still scored on a balanced test set.
struct SyntheticSpec {
  int classes = 10;
  int input_dim = 32;
  int per_class = 300;
  double separation = 3.0;
  double lt_decay = 1.0;  // 1 = balanced; smaller = steeper tail
};

TrainTest generate_synthetic(const SyntheticSpec& spec, Rng& rng);

// IDX-format loader (big-endian magic and dimensions; 0x00000803 for
// unsigned-byte image tensors, 0x00000801 for label vectors). Pixels are
// flattened row-major and scaled to [0, 1]. When expected_classes > 0,
// labels outside [0, expected_classes) are rejected; otherwise the class
// count is inferred from the largest label.
Dataset load_idx(const std::string& image_path, const std::string& label_path,
                 int expected_classes = 0);

}  // namespace cafe
