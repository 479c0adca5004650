#include "cafe/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cafe/checkpoint.hpp"
#include "cafe/errors.hpp"

namespace cafe {

namespace fs = std::filesystem;

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << content;
}

void write_round_log(const std::vector<RoundRecord>& rounds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << "round,selected,delta_norms,aggregate_norm,secs\n";
  for (const auto& r : rounds) {
    out << r.round << ",\"";
    for (size_t i = 0; i < r.selected.size(); ++i) out << (i ? " " : "") << r.selected[i];
    out << "\",\"";
    char buf[32];
    for (size_t i = 0; i < r.delta_norms.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.6g", r.delta_norms[i]);
      out << (i ? " " : "") << buf;
    }
    std::snprintf(buf, sizeof buf, "%.6g", r.aggregate_norm);
    out << "\"," << buf << ',';
    std::snprintf(buf, sizeof buf, "%.6f", r.secs);
    out << buf << '\n';
  }
}

}  // namespace

double final_accuracy(const ExperimentResult& result) {
  return result.metrics.back().acc;
}

RunOutput run_and_write(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);

  RunOutput out;
  out.result = run_experiment(cfg);

  write_text((fs::path(cfg.out) / "resolved_config.txt").string(), render_config(cfg));

  out.metrics_path = (fs::path(cfg.out) / "metrics.csv").string();
  write_metrics(out.result.metrics, out.metrics_path);

  emit_plot_data(out.result.metrics, method_name(cfg.method), cfg.seed,
                 (fs::path(cfg.out) / ("plot_" + method_name(cfg.method) + ".csv")).string());

  write_round_log(out.result.rounds, (fs::path(cfg.out) / "rounds.log").string());

  Checkpoint ckpt;
  ckpt.model_config = out.result.model_config;
  ckpt.params = out.result.final_params;
  ckpt.global_dirs = out.result.final_dirs;
  ckpt.calibration = CalibrationParams{cfg.tau, cfg.gamma, cfg.alpha, cfg.beta};
  ckpt.method = cfg.method;
  ckpt.round = cfg.rounds;
  Rng resume_rng(derive_seed(cfg.seed, "resume", static_cast<uint64_t>(cfg.rounds)));
  ckpt.rng_state = resume_rng.serialize_state();
  out.checkpoint_path = (fs::path(cfg.out) / "checkpoint.bin").string();
  save_checkpoint(ckpt, out.checkpoint_path);
  return out;
}

ExperimentConfig ablation_variant(const ExperimentConfig& base, const std::string& variant) {
  ExperimentConfig cfg = base;
  if (variant == "full") return cfg;
  if (variant == "no_pc") {
    cfg.gamma = 0.0;
    return cfg;
  }
  if (variant == "no_fc") {
    cfg.alpha = 0.0;
    cfg.beta = 0.0;
    return cfg;
  }
  if (variant == "no_ha") {
    cfg.ring_capacity = 1;
    return cfg;
  }
  throw ConfigError("unknown ablation variant '" + variant + "'");
}

std::map<std::string, RunOutput> run_ablation(const ExperimentConfig& cfg) {
  if (cfg.method != Method::Cafe)
    throw UsageError("run_ablation requires method = cafe, got " + method_name(cfg.method));

  std::map<std::string, RunOutput> outputs;
  for (const auto& variant : kAblationVariants) {
    ExperimentConfig vcfg = ablation_variant(cfg, variant);
    vcfg.out = (fs::path(cfg.out) / variant).string();
    outputs.emplace(variant, run_and_write(vcfg));
  }

  std::ofstream summary((fs::path(cfg.out) / "ablation_summary.csv").string(), std::ios::binary);
  if (!summary) throw IoError("cannot write ablation summary");
  summary << "variant,final_acc,final_loss\n";
  char buf[64];
  for (const auto& variant : kAblationVariants) {
    const auto& metrics = outputs.at(variant).result.metrics.back();
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f\n", variant.c_str(), metrics.acc, metrics.loss);
    summary << buf;
  }
  return outputs;
}

SeedStats run_seeds(const ExperimentConfig& cfg, const std::vector<uint64_t>& seeds) {
  if (seeds.empty()) throw UsageError("run_seeds: no seeds given");

  SeedStats stats;
  stats.seeds = seeds;
  for (uint64_t seed : seeds) {
    ExperimentConfig scfg = cfg;
    scfg.seed = seed;
    scfg.out = (fs::path(cfg.out) / ("seed_" + std::to_string(seed))).string();
    RunOutput run = run_and_write(scfg);
    stats.final_accs.push_back(final_accuracy(run.result));
  }

  double sum = 0.0;
  for (double a : stats.final_accs) sum += a;
  stats.mean = sum / stats.final_accs.size();
  double sq = 0.0;
  for (double a : stats.final_accs) sq += (a - stats.mean) * (a - stats.mean);
  stats.stddev = stats.final_accs.size() > 1
                     ? std::sqrt(sq / (stats.final_accs.size() - 1))
                     : 0.0;

  std::ofstream summary((fs::path(cfg.out) / "summary.csv").string(), std::ios::binary);
  if (!summary) throw IoError("cannot write seed summary");
  summary << "seed,final_acc\n";
  char buf[64];
  for (size_t i = 0; i < seeds.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%llu,%.6f\n",
                  static_cast<unsigned long long>(seeds[i]), stats.final_accs[i]);
    summary << buf;
  }
  std::snprintf(buf, sizeof buf, "mean,%.6f\nstddev,%.6f\n", stats.mean, stats.stddev);
  summary << buf;
  return stats;
}

}  // namespace cafe
