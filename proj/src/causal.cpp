#include "cafe/causal.hpp"

#include <cmath>

#include "cafe/errors.hpp"

namespace cafe {

namespace {

constexpr double kEmbeddingNormFloor = 1e-12;
constexpr double kRowNormFloor = 1e-12;
constexpr double kProbFloor = 1e-12;

// u = x - alpha (x . dg) dg - beta (x . dk) dk, the drift-removed unit-scale
// embedding; also the matching operator applied to classifier rows, since the
// projection operator is symmetric.
void remove_drift(std::span<const double> x, std::span<const double> dir_g, bool g_valid,
                  std::span<const double> dir_k, bool k_valid, double alpha, double beta,
                  std::span<double> out) {
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i];
  if (g_valid && alpha != 0.0) axpy(-alpha * dot(x, dir_g), dir_g, out);
  if (k_valid && beta != 0.0) axpy(-beta * dot(x, dir_k), dir_k, out);
}

}  // namespace

SnapshotRing::SnapshotRing(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw ConfigError("snapshot ring capacity must be at least 1");
}

void SnapshotRing::clear() { entries_.clear(); }

void SnapshotRing::push(Matrix calibrated_rows) {
  if (!entries_.empty() && !entries_.front().same_shape(calibrated_rows))
    throw ConfigError("snapshot ring: row shape mismatch");
  if (static_cast<int>(entries_.size()) == capacity_) entries_.pop_front();
  entries_.push_back(std::move(calibrated_rows));
}

const Matrix& SnapshotRing::newest() const {
  if (entries_.empty()) throw UsageError("snapshot ring is empty");
  return entries_.back();
}

Vec feature_calibration(std::span<const double> h, std::span<const double> dir_g, bool g_valid,
                        std::span<const double> dir_k, bool k_valid) {
  Vec out(h.size(), 0.0);
  double hn = norm(h);
  if (hn < kEmbeddingNormFloor) return out;
  Decomposition dec = decompose(h, dir_g, g_valid, dir_k, k_valid);
  for (size_t i = 0; i < out.size(); ++i) out[i] = dec.h_inv[i] / hn;
  return out;
}

Vec parameter_calibration(std::span<const double> classifier_row, double gamma) {
  Vec out(classifier_row.size(), 0.0);
  double denom = norm(classifier_row) + gamma;
  if (denom < kRowNormFloor) return out;
  for (size_t i = 0; i < out.size(); ++i) out[i] = classifier_row[i] / denom;
  return out;
}

double snapshot_score(std::span<const double> h, std::span<const double> calibrated_row,
                      std::span<const double> dir_g, bool g_valid, std::span<const double> dir_k,
                      bool k_valid, double alpha, double beta) {
  double hn = norm(h);
  if (hn < kEmbeddingNormFloor) return 0.0;
  Vec unit(h.size());
  for (size_t i = 0; i < unit.size(); ++i) unit[i] = h[i] / hn;
  Vec u(h.size());
  remove_drift(unit, dir_g, g_valid, dir_k, k_valid, alpha, beta, u);
  return dot(calibrated_row, u);
}

Matrix train_scores(const Matrix& h, const SnapshotRing& ring, const DriftDirections& dirs_g,
                    const DriftDirections& dirs_k, const CalibrationParams& params) {
  if (ring.count() == 0) throw UsageError("train_scores: snapshot ring is empty");
  const int classes = ring.entry(0).rows;
  const int dim = ring.entry(0).cols;
  if (h.cols != dim) throw ConfigError("train_scores: embedding dimension mismatch");

  // mean stored row per class, then fold the drift removal into the row side
  Matrix effective(classes, dim);
  const double inv_count = 1.0 / ring.count();
  for (int c = 0; c < classes; ++c) {
    Vec mean_row(dim, 0.0);
    for (int e = 0; e < ring.count(); ++e) axpy(inv_count, ring.entry(e).row(c), mean_row);
    remove_drift(mean_row, dirs_g.dirs.row(c), dirs_g.class_valid(c), dirs_k.dirs.row(c),
                 dirs_k.class_valid(c), params.alpha, params.beta, effective.row(c));
  }

  Matrix scores(h.rows, classes);
  for (int i = 0; i < h.rows; ++i) {
    auto hrow = h.row(i);
    double hn = norm(hrow);
    if (hn < kEmbeddingNormFloor) continue;  // row stays zero
    for (int c = 0; c < classes; ++c)
      scores(i, c) = params.tau * dot(effective.row(c), hrow) / hn;
  }
  return scores;
}

Matrix infer_scores(const Matrix& h, const InferenceHead& head) {
  const int classes = head.classifier.rows;
  const int dim = head.classifier.cols;
  if (h.cols != dim) throw ConfigError("infer_scores: embedding dimension mismatch");

  Matrix effective(classes, dim);
  for (int c = 0; c < classes; ++c) {
    Vec q = parameter_calibration(head.classifier.row(c), head.gamma);
    remove_drift(q, head.global_dirs.dirs.row(c), head.global_dirs.class_valid(c),
                 std::span<const double>(), false, head.alpha, 0.0, effective.row(c));
  }

  Matrix scores(h.rows, classes);
  for (int i = 0; i < h.rows; ++i) {
    auto hrow = h.row(i);
    double hn = norm(hrow);
    if (hn < kEmbeddingNormFloor) continue;
    for (int c = 0; c < classes; ++c)
      scores(i, c) = head.tau * dot(effective.row(c), hrow) / hn;
  }
  return scores;
}

int predict(std::span<const double> scores) {
  if (scores.empty()) throw UsageError("predict: no scores");
  int best = 0;
  for (size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = static_cast<int>(c);
  return best;
}

HeadLoss calibration_loss(const Matrix& h, const std::vector<int>& labels,
                          const ModelParams& params, const SnapshotRing& ring,
                          const DriftDirections& dirs_g, const DriftDirections& dirs_k,
                          const CalibrationParams& calib, ScoreProbability mode) {
  if (ring.count() == 0) throw UsageError("calibration_loss: snapshot ring is empty");
  const auto& layout = params.layout();
  const int classes = layout.num_classes;
  const int dim = layout.feature_dim;
  const int batch = h.rows;

  // the newest ring entry must be the calibrated live classifier; the
  // gradient below differentiates through it
  for (int c = 0; c < classes; ++c) {
    Vec live = parameter_calibration(params.classifier_row(c), calib.gamma);
    auto stored = ring.newest().row(c);
    for (int j = 0; j < dim; ++j)
      if (live[static_cast<size_t>(j)] != stored[j])
        throw UsageError("calibration_loss: newest ring entry is not the live classifier");
  }

  HeadLoss out;
  out.scores = train_scores(h, ring, dirs_g, dirs_k, calib);
  out.probs = (mode == ScoreProbability::Softmax) ? softmax(out.scores) : out.scores;

  // dL/dscore, batch-mean scale
  Matrix dscore(batch, classes);
  double loss = 0.0;
  if (mode == ScoreProbability::Softmax) {
    for (int i = 0; i < batch; ++i) {
      int y = labels[static_cast<size_t>(i)];
      loss -= std::log(std::max(out.probs(i, y), kProbFloor));
      for (int c = 0; c < classes; ++c)
        dscore(i, c) = (out.probs(i, c) - (c == y ? 1.0 : 0.0)) / batch;
    }
  } else {
    // clamp mode: scores are used as probabilities directly, clipped into
    // (0, 1]; gradient vanishes outside the open interval
    for (int i = 0; i < batch; ++i) {
      int y = labels[static_cast<size_t>(i)];
      double s = out.scores(i, y);
      double p = std::min(std::max(s, kProbFloor), 1.0);
      loss -= std::log(p);
      if (s > kProbFloor && s < 1.0) dscore(i, y) = -1.0 / (s * batch);
    }
    out.probs = Matrix(batch, classes);
    for (int i = 0; i < batch; ++i)
      for (int c = 0; c < classes; ++c)
        out.probs(i, c) = std::min(std::max(out.scores(i, c), kProbFloor), 1.0);
  }
  out.loss = loss / batch;

  const double tau = calib.tau;
  const int ring_count = ring.count();

  // embedding gradient: per class, the effective mean-row direction
  Matrix effective(classes, dim);
  const double inv_count = 1.0 / ring_count;
  for (int c = 0; c < classes; ++c) {
    Vec mean_row(dim, 0.0);
    for (int e = 0; e < ring_count; ++e) axpy(inv_count, ring.entry(e).row(c), mean_row);
    remove_drift(mean_row, dirs_g.dirs.row(c), dirs_g.class_valid(c), dirs_k.dirs.row(c),
                 dirs_k.class_valid(c), calib.alpha, calib.beta, effective.row(c));
  }

  out.d_embeddings = Matrix(batch, dim);
  for (int i = 0; i < batch; ++i) {
    auto hrow = h.row(i);
    double hn = norm(hrow);
    if (hn < kEmbeddingNormFloor) continue;
    Vec unit(dim);
    for (int j = 0; j < dim; ++j) unit[static_cast<size_t>(j)] = hrow[j] / hn;
    Vec combined(dim, 0.0);
    for (int c = 0; c < classes; ++c) axpy(dscore(i, c), effective.row(c), combined);
    // project out the radial component, scale by tau/|h|
    double radial = dot(combined, unit);
    auto grow = out.d_embeddings.row(i);
    for (int j = 0; j < dim; ++j)
      grow[j] = tau * (combined[static_cast<size_t>(j)] - radial * unit[static_cast<size_t>(j)]) / hn;
  }

  // classifier gradient: only the newest ring entry is live
  out.d_classifier = Matrix(classes, dim);
  for (int c = 0; c < classes; ++c) {
    auto phi = params.classifier_row(c);
    double phin = norm(phi);
    double denom = phin + calib.gamma;
    if (denom < kRowNormFloor) continue;

    Vec accum(dim, 0.0);  // sum_i dscore(i,c) * (drift-removed unit embedding)
    double along_phi = 0.0;
    for (int i = 0; i < batch; ++i) {
      auto hrow = h.row(i);
      double hn = norm(hrow);
      if (hn < kEmbeddingNormFloor) continue;
      Vec unit(dim);
      for (int j = 0; j < dim; ++j) unit[static_cast<size_t>(j)] = hrow[j] / hn;
      Vec u(dim);
      remove_drift(unit, dirs_g.dirs.row(c), dirs_g.class_valid(c), dirs_k.dirs.row(c),
                   dirs_k.class_valid(c), calib.alpha, calib.beta, u);
      double w = dscore(i, c);
      if (w == 0.0) continue;
      axpy(w, u, accum);
      along_phi += w * dot(phi, u);
    }

    auto grow = out.d_classifier.row(c);
    double lead = tau / (ring_count * denom);
    for (int j = 0; j < dim; ++j) grow[j] = lead * accum[static_cast<size_t>(j)];
    if (phin >= kRowNormFloor)
      axpy(-tau * along_phi / (ring_count * phin * denom * denom), phi, grow);
  }

  return out;
}

}  // namespace cafe
