#include "cafe/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "cafe/errors.hpp"

namespace cafe {

std::string method_name(Method m) {
  switch (m) {
    case Method::FedAvg: return "fedavg";
    case Method::FedProx: return "fedprox";
    case Method::CosAvg: return "cosavg";
    case Method::Cafe: return "cafe";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "fedavg") return Method::FedAvg;
  if (s == "fedprox") return Method::FedProx;
  if (s == "cosavg") return Method::CosAvg;
  if (s == "cafe") return Method::Cafe;
  throw ConfigError("method must be one of cafe|fedavg|fedprox|cosavg, got '" + name + "'");
}

double ExperimentConfig::effective_mu_global() const {
  if (mu_global) return *mu_global;
  return (method == Method::FedAvg || method == Method::FedProx) ? 0.0 : 0.5;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(lr > 0.0)) fail("lr must be > 0, got " + std::to_string(lr));
  if (!(mu_local >= 0.0 && mu_local < 1.0))
    fail("mu_local must lie in [0, 1), got " + std::to_string(mu_local));
  if (mu_global && !(*mu_global >= 0.0 && *mu_global < 1.0))
    fail("mu_global must lie in [0, 1), got " + std::to_string(*mu_global));
  if (!(cf > 0.0 && cf <= 1.0)) fail("cf must lie in (0, 1], got " + std::to_string(cf));
  if (!(sample_rate > 0.0 && sample_rate <= 1.0))
    fail("sample_rate must lie in (0, 1], got " + std::to_string(sample_rate));
  if (!(tau > 0.0)) fail("tau must be > 0, got " + std::to_string(tau));
  if (!(gamma >= 0.0)) fail("gamma must be >= 0, got " + std::to_string(gamma));
  if (!(alpha >= 0.0 && alpha <= 1.0))
    fail("alpha must lie in [0, 1], got " + std::to_string(alpha));
  if (!(beta >= 0.0 && beta <= 1.0)) fail("beta must lie in [0, 1], got " + std::to_string(beta));
  if (!(prox >= 0.0)) fail("prox must be >= 0, got " + std::to_string(prox));
  if (clients < 2) fail("clients must be >= 2, got " + std::to_string(clients));
  if (!(dir_alpha > 0.0)) fail("dir_alpha must be > 0, got " + std::to_string(dir_alpha));
  if (rounds < 0) fail("rounds must be >= 0, got " + std::to_string(rounds));
  if (local_epochs < 0) fail("local_epochs must be >= 0, got " + std::to_string(local_epochs));
  if (batch_size < 1) fail("batch_size must be >= 1, got " + std::to_string(batch_size));
  if (ring_capacity < 0) fail("ring_capacity must be >= 0, got " + std::to_string(ring_capacity));
  if (feature_dim < 1) fail("feature_dim must be >= 1, got " + std::to_string(feature_dim));
  for (int hdim : hidden)
    if (hdim < 1) fail("hidden widths must be >= 1, got " + std::to_string(hdim));
  if (dataset != "synthetic" && dataset != "idx")
    fail("dataset must be synthetic|idx, got '" + dataset + "'");
  if (dataset == "idx" && (idx_images.empty() || idx_labels.empty()))
    fail("dataset=idx requires idx_images and idx_labels paths");
  if (dataset == "synthetic") {
    if (synth.classes < 2) fail("classes must be >= 2, got " + std::to_string(synth.classes));
    if (synth.input_dim < synth.classes)
      fail("input_dim must be >= classes, got " + std::to_string(synth.input_dim));
    if (synth.per_class < 6) fail("per_class must be >= 6, got " + std::to_string(synth.per_class));
    if (!(synth.separation >= 0.0))
      fail("separation must be >= 0, got " + std::to_string(synth.separation));
    if (!(synth.lt_decay > 0.0 && synth.lt_decay <= 1.0))
      fail("lt_decay must lie in (0, 1], got " + std::to_string(synth.lt_decay));
  }
  if (out.empty()) fail("out directory must not be empty");
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(key + ": expected true|false, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  if (trim(value).empty()) return out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(static_cast<int>(parse_int(key, trim(item))));
  return out;
}

}  // namespace

void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "method") cfg.method = parse_method(value);
  else if (key == "clients") cfg.clients = static_cast<int>(parse_int(key, value));
  else if (key == "dir_alpha") cfg.dir_alpha = parse_double(key, value);
  else if (key == "cf") cfg.cf = parse_double(key, value);
  else if (key == "sample_rate") cfg.sample_rate = parse_double(key, value);
  else if (key == "rounds") cfg.rounds = static_cast<int>(parse_int(key, value));
  else if (key == "local_epochs") cfg.local_epochs = static_cast<int>(parse_int(key, value));
  else if (key == "batch_size") cfg.batch_size = static_cast<int>(parse_int(key, value));
  else if (key == "lr") cfg.lr = parse_double(key, value);
  else if (key == "mu_local") cfg.mu_local = parse_double(key, value);
  else if (key == "mu_global") cfg.mu_global = parse_double(key, value);
  else if (key == "prox") cfg.prox = parse_double(key, value);
  else if (key == "tau") cfg.tau = parse_double(key, value);
  else if (key == "gamma") cfg.gamma = parse_double(key, value);
  else if (key == "alpha") cfg.alpha = parse_double(key, value);
  else if (key == "beta") cfg.beta = parse_double(key, value);
  else if (key == "ring_capacity") cfg.ring_capacity = static_cast<int>(parse_int(key, value));
  else if (key == "drift_accumulation") {
    if (value == "exponential") cfg.drift_accumulation = DriftAccumMode::Exponential;
    else if (value == "per_round") cfg.drift_accumulation = DriftAccumMode::PerRound;
    else throw ConfigError("drift_accumulation must be exponential|per_round, got '" + value + "'");
  } else if (key == "drift_residual_mean") cfg.drift_residual_mean = parse_bool(key, value);
  else if (key == "score_probability") {
    if (value == "softmax") cfg.score_probability = ScoreProbability::Softmax;
    else if (value == "clamp") cfg.score_probability = ScoreProbability::Clamp;
    else throw ConfigError("score_probability must be softmax|clamp, got '" + value + "'");
  } else if (key == "hidden") cfg.hidden = parse_int_list(key, value);
  else if (key == "feature_dim") cfg.feature_dim = static_cast<int>(parse_int(key, value));
  else if (key == "activation") {
    if (value == "relu") cfg.activation = Activation::Relu;
    else if (value == "tanh") cfg.activation = Activation::Tanh;
    else if (value == "identity") cfg.activation = Activation::Identity;
    else throw ConfigError("activation must be relu|tanh|identity, got '" + value + "'");
  } else if (key == "dataset") cfg.dataset = value;
  else if (key == "classes") cfg.synth.classes = static_cast<int>(parse_int(key, value));
  else if (key == "input_dim") cfg.synth.input_dim = static_cast<int>(parse_int(key, value));
  else if (key == "per_class") cfg.synth.per_class = static_cast<int>(parse_int(key, value));
  else if (key == "separation") cfg.synth.separation = parse_double(key, value);
  else if (key == "lt_decay") cfg.synth.lt_decay = parse_double(key, value);
  else if (key == "idx_images") cfg.idx_images = value;
  else if (key == "idx_labels") cfg.idx_labels = value;
  else if (key == "seed") cfg.seed = static_cast<uint64_t>(parse_int(key, value));
  else if (key == "out") cfg.out = value;
  else if (key == "timing_in_csv") cfg.timing_in_csv = parse_bool(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = line;
    size_t hash = stripped.find('#');
    if (hash != std::string::npos) stripped = stripped.substr(0, hash);
    stripped = trim(stripped);
    if (stripped.empty()) continue;
    size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    apply_config_key(cfg, key, value);
  }
  return cfg;
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "method = " << method_name(cfg.method) << "\n";
  os << "clients = " << cfg.clients << "\n";
  os << "dir_alpha = " << cfg.dir_alpha << "\n";
  os << "cf = " << cfg.cf << "\n";
  os << "sample_rate = " << cfg.sample_rate << "\n";
  os << "rounds = " << cfg.rounds << "\n";
  os << "local_epochs = " << cfg.local_epochs << "\n";
  os << "batch_size = " << cfg.batch_size << "\n";
  os << "lr = " << cfg.lr << "\n";
  os << "mu_local = " << cfg.mu_local << "\n";
  os << "mu_global = " << cfg.effective_mu_global() << "\n";
  os << "prox = " << cfg.prox << "\n";
  os << "tau = " << cfg.tau << "\n";
  os << "gamma = " << cfg.gamma << "\n";
  os << "alpha = " << cfg.alpha << "\n";
  os << "beta = " << cfg.beta << "\n";
  os << "ring_capacity = " << cfg.effective_ring_capacity() << "\n";
  os << "drift_accumulation = "
     << (cfg.drift_accumulation == DriftAccumMode::Exponential ? "exponential" : "per_round")
     << "\n";
  os << "drift_residual_mean = " << (cfg.drift_residual_mean ? "true" : "false") << "\n";
  os << "score_probability = "
     << (cfg.score_probability == ScoreProbability::Softmax ? "softmax" : "clamp") << "\n";
  os << "hidden = ";
  for (size_t i = 0; i < cfg.hidden.size(); ++i) os << (i ? "," : "") << cfg.hidden[i];
  os << "\n";
  os << "feature_dim = " << cfg.feature_dim << "\n";
  os << "activation = "
     << (cfg.activation == Activation::Relu
             ? "relu"
             : cfg.activation == Activation::Tanh ? "tanh" : "identity")
     << "\n";
  os << "dataset = " << cfg.dataset << "\n";
  if (cfg.dataset == "synthetic") {
    os << "classes = " << cfg.synth.classes << "\n";
    os << "input_dim = " << cfg.synth.input_dim << "\n";
    os << "per_class = " << cfg.synth.per_class << "\n";
    os << "separation = " << cfg.synth.separation << "\n";
    os << "lt_decay = " << cfg.synth.lt_decay << "\n";
  } else {
    os << "idx_images = " << cfg.idx_images << "\n";
    os << "idx_labels = " << cfg.idx_labels << "\n";
  }
  os << "seed = " << cfg.seed << "\n";
  os << "out = " << cfg.out << "\n";
  os << "timing_in_csv = " << (cfg.timing_in_csv ? "true" : "false") << "\n";
  return os.str();
}

ModelConfig model_config_for(const ExperimentConfig& cfg, int input_dim, int num_classes) {
  ModelConfig mc;
  mc.input_dim = input_dim;
  mc.hidden_dims = cfg.hidden;
  mc.feature_dim = cfg.feature_dim;
  mc.num_classes = num_classes;
  mc.activation = cfg.activation;
  return mc;
}

}  // namespace cafe
