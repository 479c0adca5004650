#pragma once

#include <map>
#include <string>
#include <vector>

#include "cafe/config.hpp"
#include "cafe/federation.hpp"

namespace cafe {

// Run one experiment and persist its artifacts under cfg.out:
//   resolved_config.txt   the effective config, file syntax
//   metrics.csv           one row per round (plus the initial model)
//   plot_<method>.csv     long-format series for plotting tools
//   rounds.log            per-round selection, norms, and wall time
//   checkpoint.bin        final model, drift directions, calibration, rng
struct RunOutput {
  ExperimentResult result;
  std::string metrics_path;
  std::string checkpoint_path;
};

RunOutput run_and_write(const ExperimentConfig& cfg);

// Ablation sweep: full cafe plus the three single-module reductions, all on
// the same seed (and therefore the same partition and selection sequence).
//   no_pc  gamma = 0          (parameter calibration off: plain row normalization)
//   no_fc  alpha = beta = 0   (feature calibration off: drift terms unused)
//   no_ha  ring capacity 1    (history-aware average off)
inline const std::vector<std::string> kAblationVariants = {"full", "no_pc", "no_fc", "no_ha"};

ExperimentConfig ablation_variant(const ExperimentConfig& base, const std::string& variant);

// Runs each variant under out/<variant>/ and writes out/ablation_summary.csv.
std::map<std::string, RunOutput> run_ablation(const ExperimentConfig& cfg);

struct SeedStats {
  std::vector<uint64_t> seeds;
  Vec final_accs;
  double mean = 0.0;
  double stddev = 0.0;
};

// Re-run the config once per seed (outputs under out/seed_<s>/), writing
// out/summary.csv with the final accuracy of each run plus mean and spread.
SeedStats run_seeds(const ExperimentConfig& cfg, const std::vector<uint64_t>& seeds);

double final_accuracy(const ExperimentResult& result);

}  // namespace cafe
