// Command-line front end: run experiments, ablation sweeps, and checkpoint
// evaluation. Flags mirror the config-file keys one to one; a flag given on
// the command line overrides the same key from --config.

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cafe/checkpoint.hpp"
#include "cafe/errors.hpp"
#include "cafe/harness.hpp"

namespace {

struct FlagSet {
  // flag name (with dashes) -> config key; values arrive as strings and are
  // funneled through the same parser as the config file
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& flag, const std::string& help) {
    std::string key = flag;
    for (char& c : key)
      if (c == '-') c = '_';
    app->add_option_function<std::string>(
           "--" + flag, [this, key](const std::string& v) { values[key] = v; }, help)
        ->type_name("VALUE");
  }
};

void add_config_flags(CLI::App* app, FlagSet& flags) {
  flags.add(app, "method", "cafe | fedavg | fedprox | cosavg");
  flags.add(app, "clients", "number of clients");
  flags.add(app, "dir-alpha", "Dirichlet concentration for the label split");
  flags.add(app, "cf", "communication-frequency floor in (0,1]");
  flags.add(app, "sample-rate", "fraction of clients drawn per round");
  flags.add(app, "rounds", "communication rounds");
  flags.add(app, "local-epochs", "local mini-batch steps per round");
  flags.add(app, "batch-size", "mini-batch size");
  flags.add(app, "lr", "learning rate");
  flags.add(app, "mu-local", "client momentum decay");
  flags.add(app, "mu-global", "server momentum decay");
  flags.add(app, "tau", "score scale");
  flags.add(app, "gamma", "classifier norm penalty");
  flags.add(app, "alpha", "global drift correction weight");
  flags.add(app, "beta", "local drift correction weight");
  flags.add(app, "prox", "fedprox proximal weight");
  flags.add(app, "seed", "master seed");
  flags.add(app, "out", "output directory");
  flags.add(app, "ring-capacity", "history ring size (0 = local-epochs)");
  flags.add(app, "drift-accumulation", "exponential | per_round");
  flags.add(app, "drift-residual-mean", "true to average residual sums over the batch");
  flags.add(app, "score-probability", "softmax | clamp");
  flags.add(app, "hidden", "comma-separated hidden widths");
  flags.add(app, "feature-dim", "embedding dimension");
  flags.add(app, "activation", "relu | tanh | identity");
  flags.add(app, "dataset", "synthetic | idx");
  flags.add(app, "classes", "synthetic class count");
  flags.add(app, "input-dim", "synthetic input dimension");
  flags.add(app, "per-class", "synthetic samples per class");
  flags.add(app, "separation", "synthetic class-mean separation");
  flags.add(app, "lt-decay", "synthetic long-tail decay in (0,1]");
  flags.add(app, "idx-images", "IDX image file path");
  flags.add(app, "idx-labels", "IDX label file path");
  flags.add(app, "timing-in-csv", "true to record wall time in metrics.csv");
}

cafe::ExperimentConfig resolve_config(const std::string& config_path, const FlagSet& flags) {
  cafe::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = cafe::parse_config_file(config_path);
  for (const auto& [key, value] : flags.values) cafe::apply_config_key(cfg, key, value);
  cfg.validate();
  return cfg;
}

std::vector<uint64_t> parse_seed_list(const std::string& s) {
  std::vector<uint64_t> seeds;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw cafe::ConfigError("--seeds: no seeds parsed from '" + s + "'");
  return seeds;
}

void print_final(const cafe::ExperimentResult& result) {
  const auto& last = result.metrics.back();
  std::printf("round %d  acc %.4f  loss %.4f\n", last.round, last.acc, last.loss);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cafe: drift-aware federated learning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string seeds_arg;

  auto* run = app.add_subcommand("run", "run one experiment (or one per seed with --seeds)");
  FlagSet run_flags;
  run->add_option("--config", config_path, "config file (key = value lines)");
  run->add_option("--seeds", seeds_arg, "comma-separated seeds; runs each and summarizes");
  add_config_flags(run, run_flags);

  auto* ablation = app.add_subcommand("ablation", "full cafe plus the three module reductions");
  FlagSet ablation_flags;
  ablation->add_option("--config", config_path, "config file (key = value lines)");
  add_config_flags(ablation, ablation_flags);

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the configured test split");
  FlagSet eval_flags;
  std::string checkpoint_path;
  eval->add_option("--config", config_path, "config file (key = value lines)");
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  add_config_flags(eval, eval_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      cafe::ExperimentConfig cfg = resolve_config(config_path, run_flags);
      if (!seeds_arg.empty()) {
        cafe::SeedStats stats = cafe::run_seeds(cfg, parse_seed_list(seeds_arg));
        std::printf("seeds %zu  mean final acc %.4f  stddev %.4f\n", stats.seeds.size(),
                    stats.mean, stats.stddev);
      } else {
        cafe::RunOutput out = cafe::run_and_write(cfg);
        print_final(out.result);
        std::printf("wrote %s\n", out.metrics_path.c_str());
      }
    } else if (ablation->parsed()) {
      cafe::ExperimentConfig cfg = resolve_config(config_path, ablation_flags);
      auto outputs = cafe::run_ablation(cfg);
      for (const auto& variant : cafe::kAblationVariants) {
        const auto& last = outputs.at(variant).result.metrics.back();
        std::printf("%-6s acc %.4f  loss %.4f\n", variant.c_str(), last.acc, last.loss);
      }
    } else if (eval->parsed()) {
      cafe::ExperimentConfig cfg = resolve_config(config_path, eval_flags);
      cafe::Checkpoint ckpt = cafe::load_checkpoint(checkpoint_path);

      cafe::Dataset test;
      if (cfg.dataset == "synthetic") {
        cafe::Rng data_rng(cafe::derive_seed(cfg.seed, "data"));
        test = cafe::generate_synthetic(cfg.synth, data_rng).test;
      } else {
        test = cafe::load_idx(cfg.idx_images, cfg.idx_labels);
      }

      cafe::ExperimentConfig eval_cfg = cfg;
      eval_cfg.method = ckpt.method;
      eval_cfg.tau = ckpt.calibration.tau;
      eval_cfg.gamma = ckpt.calibration.gamma;
      eval_cfg.alpha = ckpt.calibration.alpha;
      cafe::EvalResult ev = cafe::evaluate(eval_cfg, ckpt.model_config, ckpt.params,
                                           ckpt.global_dirs, test);
      std::printf("method %s  round %d  acc %.4f  loss %.4f\n",
                  cafe::method_name(ckpt.method).c_str(), ckpt.round, ev.acc, ev.loss);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
