#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cafe/linalg.hpp"

namespace cafe {

// Drift statistics. Two per-class accumulators are maintained during
// training:
//   global:  adds -(batch residual sum for class c) * round-initial
//            classifier row c, per batch;
//   local:   adds  (batch residual sum for class c) * step size * (sum of
//            classifier-block momentum buffers over the completed steps of
//            the round), per batch.
// Their normalized rows are the unit drift directions; rows whose norm falls
// below the floor are flagged invalid and calibration skips them.

inline constexpr double kDirectionNormFloor = 1e-8;

struct DriftAccumulators {
  Matrix lambda;  // one row per class

  DriftAccumulators() = default;
  DriftAccumulators(int classes, int dim) : lambda(classes, dim) {}

  void reset() { set_zero(lambda.data); }
  void decay(double factor) { scale(lambda.data, factor); }
  void add(const DriftAccumulators& other);
};

struct DriftDirections {
  Matrix dirs;                 // unit rows where valid
  std::vector<uint8_t> valid;  // one flag per class

  DriftDirections() = default;
  DriftDirections(int classes, int dim) : dirs(classes, dim), valid(classes, 0) {}

  bool class_valid(int c) const { return valid[static_cast<size_t>(c)] != 0; }
  int num_classes() const { return dirs.rows; }
  int dim() const { return dirs.cols; }
};

// lambda_global += per-class residual sum times the round-initial classifier
// row, negated.
void accumulate_lambda_global(DriftAccumulators& acc, const Vec& residual_sums,
                              const Matrix& classifier_round_init);

// lambda_local += per-class residual sum times step * momentum row sum.
// momentum_classifier_sums holds, per class, the classifier-block rows of the
// summed momentum buffers for the round so far.
void accumulate_lambda_local(DriftAccumulators& acc, const Vec& residual_sums,
                             const Matrix& momentum_classifier_sums, double step);

// Unit direction of a single accumulator row; returns false (and zeroes the
// output) when the norm is below the floor.
bool normalize_direction(std::span<const double> lambda, std::span<double> out);

DriftDirections normalize_directions(const DriftAccumulators& acc);

struct Decomposition {
  Vec h_inv;
  Vec d_g;
  Vec d_k;
};

// Split an embedding into its component in the span of the two drift
// directions and the orthogonal remainder. Oblique direction pairs are
// orthonormalized first (Gram-Schmidt) so the remainder is orthogonal to
// both; for orthogonal pairs this reduces to plain projections. Invalid
// directions contribute nothing. Always reconstructs exactly:
// h == h_inv + d_g + d_k by construction.
Decomposition decompose(std::span<const double> h, std::span<const double> dir_g, bool g_valid,
                        std::span<const double> dir_k, bool k_valid);

// Stateful per-client tracker enforcing the call protocol: round_start
// captures the arriving global classifier, observe_batch folds one batch's
// statistics into both accumulators.
class ClientDriftTracker {
 public:
  ClientDriftTracker(int classes, int dim);

  void round_start(const Matrix& classifier_round_init);
  void observe_batch(const Vec& residual_sums, const Matrix& momentum_classifier_sums,
                     double step);

  // local statistic, reset every round
  const DriftAccumulators& lambda_local() const;
  // this round's contribution to the server-held global statistic
  const DriftAccumulators& lambda_global_contribution() const;
  DriftDirections local_directions() const;

 private:
  void require_round(const char* op) const;

  DriftAccumulators local_;
  DriftAccumulators global_contrib_;
  Matrix classifier_round_init_;
  bool in_round_ = false;
};

}  // namespace cafe
