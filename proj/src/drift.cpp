#include "cafe/drift.hpp"

#include "cafe/errors.hpp"

namespace cafe {

void DriftAccumulators::add(const DriftAccumulators& other) {
  if (!lambda.same_shape(other.lambda)) throw ConfigError("drift accumulator shape mismatch");
  for (size_t i = 0; i < lambda.data.size(); ++i) lambda.data[i] += other.lambda.data[i];
}

void accumulate_lambda_global(DriftAccumulators& acc, const Vec& residual_sums,
                              const Matrix& classifier_round_init) {
  if (static_cast<int>(residual_sums.size()) != acc.lambda.rows ||
      !acc.lambda.same_shape(classifier_round_init))
    throw ConfigError("accumulate_lambda_global: shape mismatch");
  for (int c = 0; c < acc.lambda.rows; ++c)
    axpy(-residual_sums[static_cast<size_t>(c)], classifier_round_init.row(c), acc.lambda.row(c));
}

void accumulate_lambda_local(DriftAccumulators& acc, const Vec& residual_sums,
                             const Matrix& momentum_classifier_sums, double step) {
  if (static_cast<int>(residual_sums.size()) != acc.lambda.rows ||
      !acc.lambda.same_shape(momentum_classifier_sums))
    throw ConfigError("accumulate_lambda_local: shape mismatch");
  for (int c = 0; c < acc.lambda.rows; ++c)
    axpy(residual_sums[static_cast<size_t>(c)] * step, momentum_classifier_sums.row(c),
         acc.lambda.row(c));
}

bool normalize_direction(std::span<const double> lambda, std::span<double> out) {
  double n = norm(lambda);
  if (n < kDirectionNormFloor) {
    set_zero(out);
    return false;
  }
  for (size_t i = 0; i < lambda.size(); ++i) out[i] = lambda[i] / n;
  return true;
}

DriftDirections normalize_directions(const DriftAccumulators& acc) {
  DriftDirections dirs(acc.lambda.rows, acc.lambda.cols);
  for (int c = 0; c < acc.lambda.rows; ++c)
    dirs.valid[static_cast<size_t>(c)] = normalize_direction(acc.lambda.row(c), dirs.dirs.row(c))
                                             ? 1
                                             : 0;
  return dirs;
}

Decomposition decompose(std::span<const double> h, std::span<const double> dir_g, bool g_valid,
                        std::span<const double> dir_k, bool k_valid) {
  const size_t dim = h.size();
  Decomposition out;
  out.d_g.assign(dim, 0.0);
  out.d_k.assign(dim, 0.0);
  out.h_inv.assign(h.begin(), h.end());
  if (!g_valid && !k_valid) return out;

  if (g_valid && k_valid) {
    // orthonormalize the pair; the second basis vector is the remainder of
    // dir_k after removing its dir_g component
    double overlap = dot(dir_k, dir_g);
    Vec rem(dir_k.begin(), dir_k.end());
    axpy(-overlap, dir_g, rem);
    double rem_norm = norm(rem);

    double cg = dot(h, dir_g);
    axpy(-cg, dir_g, out.h_inv);
    axpy(cg, dir_g, out.d_g);
    if (rem_norm >= kDirectionNormFloor) {
      scale(rem, 1.0 / rem_norm);
      double ck = dot(h, rem);
      axpy(-ck, rem, out.h_inv);
      axpy(ck, rem, out.d_k);
    }
    return out;
  }

  std::span<const double> dir = g_valid ? dir_g : dir_k;
  Vec& component = g_valid ? out.d_g : out.d_k;
  double coeff = dot(h, dir);
  axpy(-coeff, dir, out.h_inv);
  axpy(coeff, dir, component);
  return out;
}

ClientDriftTracker::ClientDriftTracker(int classes, int dim)
    : local_(classes, dim), global_contrib_(classes, dim) {}

void ClientDriftTracker::round_start(const Matrix& classifier_round_init) {
  if (!local_.lambda.same_shape(classifier_round_init))
    throw ConfigError("drift tracker: classifier snapshot shape mismatch");
  classifier_round_init_ = classifier_round_init;
  local_.reset();
  global_contrib_.reset();
  in_round_ = true;
}

void ClientDriftTracker::observe_batch(const Vec& residual_sums,
                                       const Matrix& momentum_classifier_sums, double step) {
  require_round("observe_batch");
  accumulate_lambda_global(global_contrib_, residual_sums, classifier_round_init_);
  accumulate_lambda_local(local_, residual_sums, momentum_classifier_sums, step);
}

const DriftAccumulators& ClientDriftTracker::lambda_local() const {
  require_round("lambda_local");
  return local_;
}

const DriftAccumulators& ClientDriftTracker::lambda_global_contribution() const {
  require_round("lambda_global_contribution");
  return global_contrib_;
}

DriftDirections ClientDriftTracker::local_directions() const {
  require_round("local_directions");
  return normalize_directions(local_);
}

void ClientDriftTracker::require_round(const char* op) const {
  if (!in_round_)
    throw UsageError(std::string("drift tracker: ") + op + " called before round_start");
}

}  // namespace cafe
