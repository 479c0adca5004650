#pragma once

#include <deque>
#include <vector>

#include "cafe/drift.hpp"
#include "cafe/linalg.hpp"
#include "cafe/model.hpp"

namespace cafe {

// Drift-aware scoring head. Three cooperating parts:
//   feature calibration    scores use the unit-scale embedding with its
//                          drift-direction projections removed;
//   parameter calibration  classifier rows are rescaled by 1/(norm + gamma);
//   history-aware average  scores are averaged over the calibrated rows
//                          stored for every batch of the current round.
// Inference keeps only the global-direction correction and drops the
// history average.

struct CalibrationParams {
  double tau = 16.0;    // positive score scale
  double gamma = 0.01;  // nonnegative norm penalty
  double alpha = 0.5;   // weight of the global-direction correction, in [0,1]
  double beta = 0.5;    // weight of the local-direction correction, in [0,1]
};

// How raw calibrated scores become the probability fed to the training loss.
enum class ScoreProbability { Softmax, Clamp };

// Per-batch calibrated classifier rows of the current round, oldest first.
class SnapshotRing {
 public:
  explicit SnapshotRing(int capacity);

  void clear();
  void push(Matrix calibrated_rows);
  int count() const { return static_cast<int>(entries_.size()); }
  int capacity() const { return capacity_; }
  const Matrix& entry(int i) const { return entries_[static_cast<size_t>(i)]; }
  const Matrix& newest() const;

 private:
  std::deque<Matrix> entries_;
  int capacity_ = 1;
};

// (h - d_g - d_k) / |h|: the unit-scale invariant part of the embedding.
// Returns the zero vector when |h| is below 1e-12.
Vec feature_calibration(std::span<const double> h, std::span<const double> dir_g, bool g_valid,
                        std::span<const double> dir_k, bool k_valid);

// row / (|row| + gamma); the zero row when the denominator is degenerate.
Vec parameter_calibration(std::span<const double> classifier_row, double gamma);

// Score of one sample against one stored calibrated row:
//   row . [ h/|h| - alpha cos(h, dir_g) dir_g - beta cos(h, dir_k) dir_k ]
// Invalid directions drop their term.
double snapshot_score(std::span<const double> h, std::span<const double> calibrated_row,
                      std::span<const double> dir_g, bool g_valid, std::span<const double> dir_k,
                      bool k_valid, double alpha, double beta);

// Training scores for a batch: tau times the mean snapshot score over every
// stored ring entry, per class. Throws UsageError on an empty ring.
Matrix train_scores(const Matrix& h, const SnapshotRing& ring, const DriftDirections& dirs_g,
                    const DriftDirections& dirs_k, const CalibrationParams& params);

// Frozen state the server needs to classify: final classifier, final global
// drift directions, and the scale/penalty/balance constants. Holds no
// client-local state by construction.
struct InferenceHead {
  Matrix classifier;  // one row per class
  DriftDirections global_dirs;
  double tau = 16.0;
  double gamma = 0.01;
  double alpha = 0.5;
};

// Inference scores: tau [ row.h/((|row|+gamma)|h|)
//                         - alpha cos(h, dir_g) row.dir_g/(|row|+gamma) ].
// An invalid direction drops the second term.
Matrix infer_scores(const Matrix& h, const InferenceHead& head);

// Index of the maximal score; ties resolve to the lowest index.
int predict(std::span<const double> scores);

struct HeadLoss {
  double loss = 0.0;
  Matrix scores;        // raw calibrated scores
  Matrix probs;         // probabilities fed to the loss
  Matrix d_embeddings;  // dL/dh, batch mean scale
  Matrix d_classifier;  // dL/d(classifier row c), batch mean scale
};

// Cross-entropy over the calibrated scores with analytic gradients. Drift
// directions and previously stored ring rows are constants; gradients reach
// the classifier only through the newest ring entry, which must be the
// calibrated form of `params`' classifier (push it before calling). The
// matching finite-difference check freezes the same quantities.
HeadLoss calibration_loss(const Matrix& h, const std::vector<int>& labels,
                          const ModelParams& params, const SnapshotRing& ring,
                          const DriftDirections& dirs_g, const DriftDirections& dirs_k,
                          const CalibrationParams& calib,
                          ScoreProbability mode = ScoreProbability::Softmax);

}  // namespace cafe
