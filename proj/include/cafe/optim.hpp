#pragma once

#include <map>
#include <vector>

#include "cafe/linalg.hpp"

namespace cafe {

// Momentum gradient descent, client and server side, plus closed-form
// expansions of both recurrences. The expansions are the oracle half of a
// dual-route check: the iterative optimizers and the closed forms must agree
// to 1e-8 relative over randomized histories.
//
// Both optimizers use the same recurrence
//     buffer <- decay * buffer + input;   params <- params - step * buffer
// The client buffer is reset to zero at the start of every communication
// round; the server buffer persists for the whole run.

class LocalMomentum {
 public:
  LocalMomentum(size_t dim, double decay, double step, bool record_history = false);

  void round_start();
  void step(Vec& params, const Vec& grad);

  const Vec& buffer() const { return buffer_; }
  // sum of buffer values over all steps taken since round_start; the drift
  // statistics consume the classifier block of this
  const Vec& buffer_round_sum() const { return buffer_sum_; }
  const std::vector<Vec>& history() const { return history_; }
  int steps_this_round() const { return steps_; }
  double decay() const { return decay_; }
  double step_size() const { return step_size_; }

 private:
  Vec buffer_;
  Vec buffer_sum_;
  std::vector<Vec> history_;
  double decay_ = 0.0;
  double step_size_ = 0.0;
  bool record_ = false;
  int steps_ = 0;
};

class GlobalMomentum {
 public:
  GlobalMomentum(size_t dim, double decay, double step);

  void step(Vec& params, const Vec& aggregate);

  const Vec& buffer() const { return buffer_; }
  int rounds_applied() const { return rounds_; }
  double decay() const { return decay_; }
  double step_size() const { return step_size_; }

 private:
  Vec buffer_;
  double decay_ = 0.0;
  double step_size_ = 0.0;
  int rounds_ = 0;
};

// One client's weighted contribution to one aggregation round.
struct RoundContribution {
  int client = 0;
  double weight = 1.0;
  Vec update;
};

// Everything the server folded in during one round; the applied aggregate is
// the weighted sum of the contributions.
struct RoundAggregate {
  std::vector<RoundContribution> parts;
};

Vec aggregate_of(const RoundAggregate& round);

// Closed-form displacement of the client parameters after `steps` updates of
// one round: sum_j -step * grad_j * (1 - decay^(steps+1-j)) / (1 - decay).
// Equals (params after the iterative steps) - (round-start params).
Vec expand_local(const std::vector<Vec>& grads, double decay, double step, int steps);

// Closed-form server momentum buffer after `rounds` rounds: the s-th round's
// weighted aggregate enters with coefficient decay^(rounds - s).
Vec expand_global(const std::vector<RoundAggregate>& history, double decay, int rounds);

// Closed-form total displacement of the global parameters after `rounds`
// rounds, carrying the server step size.
Vec expand_global_displacement(const std::vector<RoundAggregate>& history, double decay,
                               double step, int rounds);

// Per-client split of the two global expansions; values sum to the totals.
std::map<int, Vec> expand_global_by_client(const std::vector<RoundAggregate>& history,
                                           double decay, int rounds);
std::map<int, Vec> expand_global_displacement_by_client(const std::vector<RoundAggregate>& history,
                                                        double decay, double step, int rounds);

}  // namespace cafe
