#include "cafe/federation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>

#include "cafe/errors.hpp"

namespace cafe {

namespace {

// Marsaglia-Tsang gamma sampler; the alpha < 1 case is boosted from
// alpha + 1. Uses only Rng::normal and Rng::uniform so the draw count is
// well defined.
double gamma_sample(Rng& rng, double alpha) {
  if (alpha < 1.0) {
    double u = rng.uniform();
    if (u < 1e-300) u = 1e-300;
    return gamma_sample(rng, alpha + 1.0) * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u < 1e-300) u = 1e-300;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

Partition dirichlet_partition(const std::vector<int>& labels, int num_classes, int clients,
                              double concentration, Rng& rng) {
  if (clients < 2) throw ConfigError("clients must be >= 2 for partitioning");
  if (!(concentration > 0.0)) throw ConfigError("dirichlet concentration must be > 0");
  if (static_cast<int>(labels.size()) < clients)
    throw ConfigError("dataset smaller than client count: " + std::to_string(labels.size()) +
                      " samples for " + std::to_string(clients) + " clients");

  Partition part;
  part.client_indices.assign(static_cast<size_t>(clients), {});

  for (int c = 0; c < num_classes; ++c) {
    std::vector<int> members;
    for (size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) members.push_back(static_cast<int>(i));
    if (members.empty()) continue;
    rng.shuffle(members);

    Vec draws(static_cast<size_t>(clients));
    double total = 0.0;
    for (int k = 0; k < clients; ++k) {
      draws[static_cast<size_t>(k)] = gamma_sample(rng, concentration);
      total += draws[static_cast<size_t>(k)];
    }

    // largest-remainder allocation of this class's samples
    const int n = static_cast<int>(members.size());
    std::vector<int> counts(static_cast<size_t>(clients));
    std::vector<std::pair<double, int>> remainders;
    int assigned = 0;
    for (int k = 0; k < clients; ++k) {
      double share = draws[static_cast<size_t>(k)] / total * n;
      counts[static_cast<size_t>(k)] = static_cast<int>(std::floor(share));
      assigned += counts[static_cast<size_t>(k)];
      remainders.push_back({share - std::floor(share), k});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (int i = 0; i < n - assigned; ++i) ++counts[static_cast<size_t>(remainders[static_cast<size_t>(i)].second)];

    int cursor = 0;
    for (int k = 0; k < clients; ++k)
      for (int s = 0; s < counts[static_cast<size_t>(k)]; ++s)
        part.client_indices[static_cast<size_t>(k)].push_back(members[static_cast<size_t>(cursor++)]);
  }

  // repair: no client may end up empty
  for (int k = 0; k < clients; ++k) {
    if (!part.client_indices[static_cast<size_t>(k)].empty()) continue;
    int donor = -1;
    size_t donor_size = 1;  // donor must keep at least one sample
    for (int j = 0; j < clients; ++j)
      if (part.client_indices[static_cast<size_t>(j)].size() > donor_size) {
        donor = j;
        donor_size = part.client_indices[static_cast<size_t>(j)].size();
      }
    if (donor < 0) throw ConfigError("cannot repair empty client: no donor with spare samples");
    part.client_indices[static_cast<size_t>(k)].push_back(
        part.client_indices[static_cast<size_t>(donor)].back());
    part.client_indices[static_cast<size_t>(donor)].pop_back();
  }

  for (auto& shard : part.client_indices) std::sort(shard.begin(), shard.end());

  part.class_histograms = Matrix(clients, num_classes);
  part.weights.assign(static_cast<size_t>(clients), 0.0);
  for (int k = 0; k < clients; ++k) {
    for (int idx : part.client_indices[static_cast<size_t>(k)])
      part.class_histograms(k, labels[static_cast<size_t>(idx)]) += 1.0;
    part.weights[static_cast<size_t>(k)] =
        static_cast<double>(part.client_indices[static_cast<size_t>(k)].size()) / labels.size();
  }
  return part;
}

ParticipationModel build_participation(int clients, double cf) {
  if (!(cf > 0.0 && cf <= 1.0))
    throw ConfigError("cf must lie in (0, 1], got " + std::to_string(cf));
  if (clients < 1) throw ConfigError("clients must be >= 1");
  ParticipationModel model;
  model.freq.assign(static_cast<size_t>(clients), 1.0);
  if (clients == 1) return model;
  for (int k = 0; k < clients; ++k)
    model.freq[static_cast<size_t>(k)] = cf + (1.0 - cf) * k / (clients - 1);
  return model;
}

std::vector<int> select_round_clients(const ParticipationModel& model, double sample_rate,
                                      Rng& rng) {
  if (!(sample_rate > 0.0 && sample_rate <= 1.0))
    throw ConfigError("sample_rate must lie in (0, 1], got " + std::to_string(sample_rate));
  const int clients = static_cast<int>(model.freq.size());
  const int pool_size = std::min(clients, std::max(1, static_cast<int>(std::ceil(sample_rate * clients))));
  while (true) {
    std::vector<int> pool = rng.sample_without_replacement(pool_size, clients);
    std::vector<int> selected;
    for (int k : pool)
      if (rng.uniform() < model.freq[static_cast<size_t>(k)]) selected.push_back(k);
    if (!selected.empty()) return selected;
  }
}

namespace {

Matrix gather_batch(const Dataset& data, std::span<const int> indices) {
  Matrix x(static_cast<int>(indices.size()), data.feature_dim);
  for (size_t i = 0; i < indices.size(); ++i) {
    auto src = data.features.row(indices[i]);
    auto dst = x.row(static_cast<int>(i));
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return x;
}

std::vector<int> gather_labels(const Dataset& data, std::span<const int> indices) {
  std::vector<int> y(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) y[i] = data.labels[static_cast<size_t>(indices[i])];
  return y;
}

// Deterministic mini-batch walk over a shard: a shuffled pass, reshuffled
// whenever fewer than a full batch remains.
class BatchSampler {
 public:
  BatchSampler(std::span<const int> shard, int batch_size, Rng& rng)
      : indices_(shard.begin(), shard.end()),
        batch_(std::min<size_t>(static_cast<size_t>(batch_size), indices_.size())),
        rng_(rng) {
    rng_.shuffle(indices_);
  }

  std::vector<int> next() {
    if (cursor_ + batch_ > indices_.size()) {
      rng_.shuffle(indices_);
      cursor_ = 0;
    }
    std::vector<int> out(indices_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                         indices_.begin() + static_cast<std::ptrdiff_t>(cursor_ + batch_));
    cursor_ += batch_;
    return out;
  }

 private:
  std::vector<int> indices_;
  size_t batch_;
  Rng& rng_;
  size_t cursor_ = 0;
};

// softmax cross-entropy gradients for the plain logit head, batch-mean scale
void plain_head_gradients(const ModelParams& params, const Matrix& h, const std::vector<int>& y,
                          Matrix& probs, Matrix& d_embeddings, Matrix& d_classifier) {
  probs = softmax(logits(params, h));
  Matrix residual = batch_residual(probs, y);
  const double inv_n = 1.0 / h.rows;
  d_embeddings = grad_wrt_features(residual, params);
  scale(d_embeddings.data, inv_n);
  d_classifier = grad_wrt_classifier(residual, h);
  scale(d_classifier.data, inv_n);
}

// cosine-classifier head: scores tau * <phi_c, h> / (|phi_c| |h|), gradients
// written out directly. Kept independent of the calibrated head on purpose:
// the two paths must agree when the calibration is reduced away, and the
// check is only meaningful if they share no code.
void cosine_head_gradients(const ModelParams& params, const Matrix& h, const std::vector<int>& y,
                           double tau, Matrix& probs, Matrix& d_embeddings, Matrix& d_classifier,
                           double& loss) {
  const auto& layout = params.layout();
  const int classes = layout.num_classes;
  const int dim = layout.feature_dim;
  const int batch = h.rows;

  Matrix unit_rows(classes, dim);
  Vec row_norms(static_cast<size_t>(classes), 0.0);
  for (int c = 0; c < classes; ++c) {
    auto phi = params.classifier_row(c);
    double n = norm(phi);
    row_norms[static_cast<size_t>(c)] = n;
    if (n < 1e-12) continue;
    auto dst = unit_rows.row(c);
    for (int j = 0; j < dim; ++j) dst[j] = phi[j] / n;
  }

  Matrix scores(batch, classes);
  Matrix units(batch, dim);
  std::vector<double> h_norms(static_cast<size_t>(batch), 0.0);
  for (int i = 0; i < batch; ++i) {
    auto hrow = h.row(i);
    double hn = norm(hrow);
    h_norms[static_cast<size_t>(i)] = hn;
    if (hn < 1e-12) continue;
    auto urow = units.row(i);
    for (int j = 0; j < dim; ++j) urow[j] = hrow[j] / hn;
    for (int c = 0; c < classes; ++c)
      scores(i, c) = tau * dot(unit_rows.row(c), units.row(i));
  }

  probs = softmax(scores);
  loss = cross_entropy(probs, y);
  Matrix dscore(batch, classes);
  for (int i = 0; i < batch; ++i)
    for (int c = 0; c < classes; ++c)
      dscore(i, c) = (probs(i, c) - (y[static_cast<size_t>(i)] == c ? 1.0 : 0.0)) / batch;

  d_embeddings = Matrix(batch, dim);
  for (int i = 0; i < batch; ++i) {
    double hn = h_norms[static_cast<size_t>(i)];
    if (hn < 1e-12) continue;
    Vec combined(static_cast<size_t>(dim), 0.0);
    for (int c = 0; c < classes; ++c) axpy(dscore(i, c), unit_rows.row(c), combined);
    double radial = dot(combined, units.row(i));
    auto grow = d_embeddings.row(i);
    for (int j = 0; j < dim; ++j)
      grow[j] = tau * (combined[static_cast<size_t>(j)] - radial * units(i, j)) / hn;
  }

  d_classifier = Matrix(classes, dim);
  for (int c = 0; c < classes; ++c) {
    double n = row_norms[static_cast<size_t>(c)];
    if (n < 1e-12) continue;
    auto phi = params.classifier_row(c);
    Vec accum(static_cast<size_t>(dim), 0.0);
    double along_phi = 0.0;
    for (int i = 0; i < batch; ++i) {
      double w = dscore(i, c);
      if (w == 0.0 || h_norms[static_cast<size_t>(i)] < 1e-12) continue;
      axpy(w, units.row(i), accum);
      along_phi += w * dot(phi, units.row(i));
    }
    auto grow = d_classifier.row(c);
    double lead = tau / n;
    for (int j = 0; j < dim; ++j) grow[j] = lead * accum[static_cast<size_t>(j)];
    axpy(-tau * along_phi / (n * n * n), phi, grow);
  }
}

void add_classifier_grad(Vec& grad, const ModelParams& params, const Matrix& d_classifier) {
  const auto& layout = params.layout();
  for (int c = 0; c < layout.num_classes; ++c) {
    double* dst = grad.data() + layout.classifier_off + static_cast<size_t>(c) * layout.feature_dim;
    auto src = d_classifier.row(c);
    for (int j = 0; j < layout.feature_dim; ++j) dst[j] += src[j];
  }
}

}  // namespace

ClientUpdate client_local_train(const ExperimentConfig& cfg, const ModelConfig& mcfg,
                                const ModelParams& global_params, const Dataset& train,
                                std::span<const int> shard, double weight,
                                const DriftDirections& server_dirs, int round, Rng& rng) {
  ClientUpdate out;
  out.weight = weight;
  out.round = round;
  if (shard.empty()) {
    std::cerr << "warning: skipping client with empty shard in round " << round << "\n";
    return out;
  }
  out.valid = true;

  ModelParams params = global_params;
  LocalMomentum opt(params.size(), cfg.mu_local, cfg.lr);
  opt.round_start();

  const int classes = mcfg.num_classes;
  const int dim = mcfg.feature_dim;

  SnapshotRing ring(std::max(1, cfg.effective_ring_capacity()));
  ClientDriftTracker tracker(classes, dim);
  CalibrationParams calib{cfg.tau, cfg.gamma, cfg.alpha, cfg.beta};
  if (cfg.method == Method::Cafe) tracker.round_start(global_params.classifier_matrix());

  BatchSampler sampler(shard, cfg.batch_size, rng);
  for (int step = 0; step < cfg.local_epochs; ++step) {
    std::vector<int> batch_idx = sampler.next();
    Matrix x = gather_batch(train, batch_idx);
    std::vector<int> y = gather_labels(train, batch_idx);

    ForwardCache cache;
    Matrix h = forward_features(mcfg, params, x, &cache);

    Matrix d_embeddings, d_classifier, probs;
    if (cfg.method == Method::Cafe) {
      // drift statistics come from the plain softmax residuals of the raw
      // logits; the local statistic sees only momentum from completed steps
      Matrix raw_probs = softmax(logits(params, h));
      Matrix residual = batch_residual(raw_probs, y);
      Vec resid_sums = residual_class_sums(residual);
      if (cfg.drift_residual_mean) scale(resid_sums, 1.0 / h.rows);

      Matrix momentum_rows(classes, dim);
      {
        const auto& layout = params.layout();
        const Vec& sums = opt.buffer_round_sum();
        for (int c = 0; c < classes; ++c) {
          const double* src =
              sums.data() + layout.classifier_off + static_cast<size_t>(c) * dim;
          auto dst = momentum_rows.row(c);
          for (int j = 0; j < dim; ++j) dst[j] = src[j];
        }
      }
      tracker.observe_batch(resid_sums, momentum_rows, cfg.lr);
      DriftDirections local_dirs = tracker.local_directions();

      Matrix calibrated(classes, dim);
      for (int c = 0; c < classes; ++c) {
        Vec q = parameter_calibration(params.classifier_row(c), cfg.gamma);
        auto dst = calibrated.row(c);
        std::copy(q.begin(), q.end(), dst.begin());
      }
      ring.push(std::move(calibrated));

      HeadLoss head_loss = calibration_loss(h, y, params, ring, server_dirs, local_dirs, calib,
                                            cfg.score_probability);
      d_embeddings = std::move(head_loss.d_embeddings);
      d_classifier = std::move(head_loss.d_classifier);
    } else if (cfg.method == Method::CosAvg) {
      double loss = 0.0;
      cosine_head_gradients(params, h, y, cfg.tau, probs, d_embeddings, d_classifier, loss);
    } else {
      plain_head_gradients(params, h, y, probs, d_embeddings, d_classifier);
    }

    Vec grad = backprop_extractor(mcfg, params, cache, d_embeddings);
    add_classifier_grad(grad, params, d_classifier);

    if (cfg.method == Method::FedProx && cfg.prox != 0.0)
      for (size_t i = 0; i < grad.size(); ++i)
        grad[i] += cfg.prox * (params.values[i] - global_params.values[i]);

    opt.step(params.values, grad);
  }

  out.update.assign(params.size(), 0.0);
  double delta_sq = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    double delta = global_params.values[i] - params.values[i];
    out.update[i] = delta / cfg.lr;
    delta_sq += delta * delta;
  }
  out.delta_norm = std::sqrt(delta_sq);

  if (cfg.method == Method::Cafe) {
    out.drift_contribution = tracker.lambda_global_contribution();
    out.has_drift = true;
  }
  return out;
}

void server_aggregate(const std::vector<ClientUpdate>& updates, Method method,
                      GlobalMomentum& momentum, ModelParams& global_params) {
  std::vector<const ClientUpdate*> valid;
  for (const auto& u : updates)
    if (u.valid) valid.push_back(&u);
  if (valid.empty()) throw UsageError("server_aggregate: no valid updates");
  std::sort(valid.begin(), valid.end(),
            [](const ClientUpdate* a, const ClientUpdate* b) { return a->client < b->client; });

  double weight_total = 0.0;
  for (const auto* u : valid) weight_total += u->weight;

  Vec aggregate(global_params.size(), 0.0);
  for (const auto* u : valid) {
    if (u->update.size() != aggregate.size())
      throw ConfigError("server_aggregate: update shape mismatch from client " +
                        std::to_string(u->client));
    double w = (method == Method::FedAvg || method == Method::FedProx)
                   ? u->weight / weight_total
                   : 1.0 / static_cast<double>(valid.size());
    axpy(w, u->update, aggregate);
  }
  momentum.step(global_params.values, aggregate);
}

EvalResult evaluate(const ExperimentConfig& cfg, const ModelConfig& mcfg,
                    const ModelParams& params, const DriftDirections& server_dirs,
                    const Dataset& test) {
  Matrix h = forward_features(mcfg, params, test.features);

  Matrix scores;
  switch (cfg.method) {
    case Method::FedAvg:
    case Method::FedProx:
      scores = logits(params, h);
      break;
    case Method::CosAvg: {
      scores = Matrix(h.rows, mcfg.num_classes);
      Matrix unit_rows(mcfg.num_classes, mcfg.feature_dim);
      for (int c = 0; c < mcfg.num_classes; ++c) {
        auto phi = params.classifier_row(c);
        double n = norm(phi);
        if (n < 1e-12) continue;
        auto dst = unit_rows.row(c);
        for (int j = 0; j < mcfg.feature_dim; ++j) dst[j] = phi[j] / n;
      }
      for (int i = 0; i < h.rows; ++i) {
        auto hrow = h.row(i);
        double hn = norm(hrow);
        if (hn < 1e-12) continue;
        for (int c = 0; c < mcfg.num_classes; ++c)
          scores(i, c) = cfg.tau * dot(unit_rows.row(c), hrow) / hn;
      }
      break;
    }
    case Method::Cafe: {
      InferenceHead head;
      head.classifier = params.classifier_matrix();
      head.global_dirs = server_dirs;
      head.tau = cfg.tau;
      head.gamma = cfg.gamma;
      head.alpha = cfg.alpha;
      scores = infer_scores(h, head);
      break;
    }
  }

  Matrix probs = softmax(scores);
  EvalResult out;
  out.loss = cross_entropy(probs, test.labels);
  out.per_class_acc.assign(static_cast<size_t>(test.num_classes), 0.0);
  Vec class_counts(static_cast<size_t>(test.num_classes), 0.0);
  int correct = 0;
  for (int i = 0; i < h.rows; ++i) {
    int y = test.labels[static_cast<size_t>(i)];
    class_counts[static_cast<size_t>(y)] += 1.0;
    if (predict(scores.row(i)) == y) {
      ++correct;
      out.per_class_acc[static_cast<size_t>(y)] += 1.0;
    }
  }
  out.acc = static_cast<double>(correct) / std::max(1, h.rows);
  for (size_t c = 0; c < out.per_class_acc.size(); ++c)
    if (class_counts[c] > 0.0) out.per_class_acc[c] /= class_counts[c];
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  TrainTest data;
  if (cfg.dataset == "synthetic") {
    Rng data_rng(derive_seed(cfg.seed, "data"));
    data = generate_synthetic(cfg.synth, data_rng);
  } else {
    Dataset full = load_idx(cfg.idx_images, cfg.idx_labels);
    // idx input arrives as a single file pair; the last sixth becomes the
    // test split, mirroring the synthetic 5:1 ratio
    int test_count = std::max(1, full.size() / 6);
    int train_count = full.size() - test_count;
    data.train.feature_dim = data.test.feature_dim = full.feature_dim;
    data.train.num_classes = data.test.num_classes = full.num_classes;
    data.train.features = Matrix(train_count, full.feature_dim);
    data.test.features = Matrix(test_count, full.feature_dim);
    for (int i = 0; i < train_count; ++i) {
      auto src = full.features.row(i);
      std::copy(src.begin(), src.end(), data.train.features.row(i).begin());
      data.train.labels.push_back(full.labels[static_cast<size_t>(i)]);
    }
    for (int i = 0; i < test_count; ++i) {
      auto src = full.features.row(train_count + i);
      std::copy(src.begin(), src.end(), data.test.features.row(i).begin());
      data.test.labels.push_back(full.labels[static_cast<size_t>(train_count + i)]);
    }
  }

  const int classes = data.train.num_classes;
  ModelConfig mcfg = model_config_for(cfg, data.train.feature_dim, classes);

  ModelParams params(mcfg);
  {
    Rng init_rng(derive_seed(cfg.seed, "init"));
    params.init_random(init_rng);
  }

  Rng part_rng(derive_seed(cfg.seed, "partition"));
  Partition partition =
      dirichlet_partition(data.train.labels, classes, cfg.clients, cfg.dir_alpha, part_rng);
  ParticipationModel participation = build_participation(cfg.clients, cfg.cf);

  GlobalMomentum server_opt(params.size(), cfg.effective_mu_global(), cfg.lr);
  DriftAccumulators server_lambda(classes, mcfg.feature_dim);
  DriftDirections server_dirs(classes, mcfg.feature_dim);

  std::vector<int> participation_counts(static_cast<size_t>(cfg.clients), 0);
  auto mean_participation = [&] {
    long total = 0;
    for (int c : participation_counts) total += c;
    return static_cast<double>(total) / cfg.clients;
  };

  ExperimentResult result;
  result.model_config = mcfg;

  auto append_metrics = [&](int round, double secs) {
    EvalResult ev = evaluate(cfg, mcfg, params, server_dirs, data.test);
    MetricsRow row;
    row.round = round;
    row.acc = ev.acc;
    row.loss = ev.loss;
    row.per_class_acc = ev.per_class_acc;
    row.participation = mean_participation();
    row.secs = cfg.timing_in_csv ? secs : 0.0;
    result.metrics.push_back(std::move(row));
  };

  append_metrics(0, 0.0);

  for (int r = 1; r <= cfg.rounds; ++r) {
    auto t0 = std::chrono::steady_clock::now();

    Rng select_rng(derive_seed(cfg.seed, "select", static_cast<uint64_t>(r)));
    std::vector<int> selected = select_round_clients(participation, cfg.sample_rate, select_rng);

    std::vector<ClientUpdate> updates;
    for (int k : selected) {
      Rng client_rng(derive_seed(cfg.seed, "client", static_cast<uint64_t>(r),
                                 static_cast<uint64_t>(k)));
      ClientUpdate u = client_local_train(
          cfg, mcfg, params, data.train, partition.client_indices[static_cast<size_t>(k)],
          partition.weights[static_cast<size_t>(k)], server_dirs, r, client_rng);
      u.client = k;
      updates.push_back(std::move(u));
    }

    RoundRecord record;
    record.round = r;
    record.selected = selected;
    for (const auto& u : updates) record.delta_norms.push_back(u.delta_norm);

    bool any_valid = false;
    for (const auto& u : updates) any_valid |= u.valid;
    if (any_valid) {
      server_aggregate(updates, cfg.method, server_opt, params);
      record.aggregate_norm = norm(server_opt.buffer()) * cfg.lr;

      if (cfg.method == Method::Cafe) {
        if (cfg.drift_accumulation == DriftAccumMode::Exponential)
          server_lambda.decay(cfg.effective_mu_global());
        else
          server_lambda.reset();
        for (const auto& u : updates)
          if (u.valid && u.has_drift) server_lambda.add(u.drift_contribution);
        server_dirs = normalize_directions(server_lambda);
      }

      for (const auto& u : updates)
        if (u.valid) ++participation_counts[static_cast<size_t>(u.client)];
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    record.secs = secs;
    result.rounds.push_back(std::move(record));
    append_metrics(r, secs);
  }

  result.final_params = params;
  result.final_dirs = server_dirs;
  result.head.classifier = params.classifier_matrix();
  result.head.global_dirs = server_dirs;
  result.head.tau = cfg.tau;
  result.head.gamma = cfg.gamma;
  result.head.alpha = cfg.alpha;
  result.partition = std::move(partition);
  return result;
}

}  // namespace cafe
