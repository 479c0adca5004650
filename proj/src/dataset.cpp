#include "cafe/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "cafe/errors.hpp"

namespace cafe {

namespace {

Matrix class_means(const SyntheticSpec& spec) {
  // scaled standard-basis simplex, centered; pairwise distance equals
  // spec.separation exactly
  Matrix means(spec.classes, spec.input_dim);
  const double scale = spec.separation / std::sqrt(2.0);
  const double shift = scale / spec.classes;
  for (int c = 0; c < spec.classes; ++c) {
    for (int d = 0; d < spec.input_dim; ++d) means(c, d) = (d < spec.classes) ? -shift : 0.0;
    means(c, c) += scale;
  }
  return means;
}

void append_samples(Dataset& ds, const Matrix& means, int cls, int count, Rng& rng, int& row) {
  for (int s = 0; s < count; ++s) {
    for (int d = 0; d < ds.feature_dim; ++d) ds.features(row, d) = means(cls, d) + rng.normal();
    ds.labels[static_cast<size_t>(row)] = cls;
    ++row;
  }
}

}  // namespace

TrainTest generate_synthetic(const SyntheticSpec& spec, Rng& rng) {
  if (spec.classes < 2) throw ConfigError("synthetic classes must be at least 2");
  if (spec.input_dim < spec.classes)
    throw ConfigError("synthetic input_dim must be at least the class count");
  if (spec.per_class < 6) throw ConfigError("synthetic per_class must be at least 6");
  if (!(spec.separation >= 0.0)) throw ConfigError("synthetic separation must be nonnegative");
  if (!(spec.lt_decay > 0.0 && spec.lt_decay <= 1.0))
    throw ConfigError("synthetic lt_decay must lie in (0, 1]");

  Matrix means = class_means(spec);

  std::vector<int> train_counts(spec.classes), test_counts(spec.classes);
  int train_total = 0, test_total = 0;
  for (int c = 0; c < spec.classes; ++c) {
    double decay = std::pow(spec.lt_decay, c);
    train_counts[static_cast<size_t>(c)] =
        std::max(1, static_cast<int>(std::llround(spec.per_class * (5.0 / 6.0) * decay)));
    test_counts[static_cast<size_t>(c)] =
        std::max(1, static_cast<int>(std::llround(spec.per_class / 6.0)));
    train_total += train_counts[static_cast<size_t>(c)];
    test_total += test_counts[static_cast<size_t>(c)];
  }

  TrainTest out;
  out.train.feature_dim = out.test.feature_dim = spec.input_dim;
  out.train.num_classes = out.test.num_classes = spec.classes;
  out.train.features = Matrix(train_total, spec.input_dim);
  out.train.labels.assign(static_cast<size_t>(train_total), 0);
  out.test.features = Matrix(test_total, spec.input_dim);
  out.test.labels.assign(static_cast<size_t>(test_total), 0);

  // draw order: per class, train samples then test samples
  int train_row = 0, test_row = 0;
  for (int c = 0; c < spec.classes; ++c) {
    append_samples(out.train, means, c, train_counts[static_cast<size_t>(c)], rng, train_row);
    append_samples(out.test, means, c, test_counts[static_cast<size_t>(c)], rng, test_row);
  }
  return out;
}

namespace {

uint32_t read_be32(std::ifstream& in, const std::string& path, size_t offset) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4))
    throw IoError(path + ": truncated while reading 4 bytes at offset " + std::to_string(offset));
  return (static_cast<uint32_t>(bytes[0]) << 24) | (static_cast<uint32_t>(bytes[1]) << 16) |
         (static_cast<uint32_t>(bytes[2]) << 8) | static_cast<uint32_t>(bytes[3]);
}

}  // namespace

Dataset load_idx(const std::string& image_path, const std::string& label_path,
                 int expected_classes) {
  std::ifstream img(image_path, std::ios::binary);
  if (!img) throw IoError("cannot open image file: " + image_path);
  uint32_t magic = read_be32(img, image_path, 0);
  if (magic != 0x00000803u)
    throw IoError(image_path + ": bad image magic at offset 0 (expected 0x00000803, got 0x" +
                  [&] { char b[16]; snprintf(b, sizeof b, "%08x", magic); return std::string(b); }() +
                  ")");
  uint32_t count = read_be32(img, image_path, 4);
  uint32_t rows = read_be32(img, image_path, 8);
  uint32_t cols = read_be32(img, image_path, 12);

  std::ifstream lab(label_path, std::ios::binary);
  if (!lab) throw IoError("cannot open label file: " + label_path);
  uint32_t lmagic = read_be32(lab, label_path, 0);
  if (lmagic != 0x00000801u)
    throw IoError(label_path + ": bad label magic at offset 0 (expected 0x00000801)");
  uint32_t lcount = read_be32(lab, label_path, 4);
  if (lcount != count)
    throw IoError("image/label count mismatch: " + std::to_string(count) + " images vs " +
                  std::to_string(lcount) + " labels");

  const size_t pixels = static_cast<size_t>(rows) * cols;
  Dataset ds;
  ds.feature_dim = static_cast<int>(pixels);
  ds.features = Matrix(static_cast<int>(count), static_cast<int>(pixels));
  ds.labels.assign(count, 0);

  std::vector<unsigned char> buf(pixels);
  for (uint32_t i = 0; i < count; ++i) {
    if (!img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels)))
      throw IoError(image_path + ": truncated at image " + std::to_string(i) + " (offset " +
                    std::to_string(16 + static_cast<size_t>(i) * pixels) + ")");
    for (size_t p = 0; p < pixels; ++p)
      ds.features(static_cast<int>(i), static_cast<int>(p)) = buf[p] / 255.0;
  }

  int max_label = 0;
  for (uint32_t i = 0; i < count; ++i) {
    char b;
    if (!lab.get(b))
      throw IoError(label_path + ": truncated at label " + std::to_string(i) + " (offset " +
                    std::to_string(8 + i) + ")");
    int y = static_cast<unsigned char>(b);
    if (expected_classes > 0 && y >= expected_classes)
      throw IoError(label_path + ": label " + std::to_string(y) + " at index " +
                    std::to_string(i) + " outside [0, " + std::to_string(expected_classes) + ")");
    ds.labels[i] = y;
    max_label = std::max(max_label, y);
  }
  ds.num_classes = expected_classes > 0 ? expected_classes : max_label + 1;
  return ds;
}

}  // namespace cafe
