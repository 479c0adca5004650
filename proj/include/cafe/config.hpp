#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cafe/causal.hpp"
#include "cafe/dataset.hpp"
#include "cafe/model.hpp"

namespace cafe {

// Training method run by the federation loop. cosavg is the plain
// cosine-classifier baseline: identical federation plumbing to cafe with the
// whole calibration head disabled, kept as an independent implementation so
// the reduction equivalence can be checked across two code paths.
enum class Method { FedAvg, FedProx, CosAvg, Cafe };

std::string method_name(Method m);
Method parse_method(const std::string& name);

enum class DriftAccumMode { Exponential, PerRound };

// Full experiment description. A config plus nothing else determines every
// output byte of a run.
struct ExperimentConfig {
  Method method = Method::Cafe;

  // federation
  int clients = 100;
  double dir_alpha = 0.1;
  double cf = 1.0;
  double sample_rate = 0.1;
  int rounds = 300;
  int local_epochs = 5;  // local mini-batch steps per round
  int batch_size = 32;

  // optimizers
  double lr = 0.001;
  double mu_local = 0.9;
  std::optional<double> mu_global;  // unset: 0 for fedavg/fedprox, 0.5 for cafe/cosavg
  double prox = 0.01;

  // calibration head
  double tau = 16.0;
  double gamma = 0.01;
  double alpha = 0.5;
  double beta = 0.5;
  int ring_capacity = 0;  // 0: use local_epochs
  DriftAccumMode drift_accumulation = DriftAccumMode::Exponential;
  bool drift_residual_mean = false;  // batch residual sums divided by batch size
  ScoreProbability score_probability = ScoreProbability::Softmax;

  // model
  std::vector<int> hidden = {64};
  int feature_dim = 32;
  Activation activation = Activation::Relu;

  // data
  std::string dataset = "synthetic";  // "synthetic" | "idx"
  SyntheticSpec synth;
  std::string idx_images;
  std::string idx_labels;

  // run
  uint64_t seed = 1;
  std::string out = "out";
  bool timing_in_csv = false;  // keep wall time out of the metrics file so
                               // re-runs are byte-identical

  double effective_mu_global() const;
  int effective_ring_capacity() const { return ring_capacity > 0 ? ring_capacity : local_epochs; }

  // Throws ConfigError naming the offending field and its bound.
  void validate() const;
};

// Line-oriented "key = value" file; '#' starts a comment. Keys match the CLI
// flag names with dashes replaced by underscores. Unknown keys are errors.
ExperimentConfig parse_config_file(const std::string& path);

// Apply one key/value pair (shared by the file parser and CLI overrides).
void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// The config echoed back in file syntax, one key per line.
std::string render_config(const ExperimentConfig& cfg);

ModelConfig model_config_for(const ExperimentConfig& cfg, int input_dim, int num_classes);

}  // namespace cafe
