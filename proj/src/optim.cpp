#include "cafe/optim.hpp"

#include <cmath>
#include <string>

#include "cafe/errors.hpp"

namespace cafe {

namespace {

void check_decay(double decay) {
  if (!(decay >= 0.0 && decay < 1.0))
    throw ConfigError("momentum decay must lie in [0, 1), got " + std::to_string(decay));
}

void check_finite(const Vec& grad, const char* who) {
  for (size_t i = 0; i < grad.size(); ++i)
    if (!std::isfinite(grad[i]))
      throw NumericError(std::string(who) + ": non-finite gradient entry at index " +
                         std::to_string(i));
}

// (1 - decay^power) / (1 - decay), the partial geometric sum
double tail_weight(double decay, int power) {
  if (decay == 0.0) return 1.0;
  return (1.0 - std::pow(decay, power)) / (1.0 - decay);
}

}  // namespace

LocalMomentum::LocalMomentum(size_t dim, double decay, double step, bool record_history)
    : buffer_(dim, 0.0), buffer_sum_(dim, 0.0), decay_(decay), step_size_(step),
      record_(record_history) {
  check_decay(decay);
  if (!(step > 0.0)) throw ConfigError("step size must be positive, got " + std::to_string(step));
}

void LocalMomentum::round_start() {
  set_zero(buffer_);
  set_zero(buffer_sum_);
  history_.clear();
  steps_ = 0;
}

void LocalMomentum::step(Vec& params, const Vec& grad) {
  check_finite(grad, "local optimizer");
  if (grad.size() != buffer_.size() || params.size() != buffer_.size())
    throw ConfigError("local optimizer: shape mismatch");
  for (size_t i = 0; i < buffer_.size(); ++i) {
    buffer_[i] = decay_ * buffer_[i] + grad[i];
    params[i] -= step_size_ * buffer_[i];
    buffer_sum_[i] += buffer_[i];
  }
  if (record_) history_.push_back(grad);
  ++steps_;
}

GlobalMomentum::GlobalMomentum(size_t dim, double decay, double step)
    : buffer_(dim, 0.0), decay_(decay), step_size_(step) {
  check_decay(decay);
  if (!(step > 0.0)) throw ConfigError("step size must be positive, got " + std::to_string(step));
}

void GlobalMomentum::step(Vec& params, const Vec& aggregate) {
  check_finite(aggregate, "global optimizer");
  if (aggregate.size() != buffer_.size() || params.size() != buffer_.size())
    throw ConfigError("global optimizer: shape mismatch");
  for (size_t i = 0; i < buffer_.size(); ++i) {
    buffer_[i] = decay_ * buffer_[i] + aggregate[i];
    params[i] -= step_size_ * buffer_[i];
  }
  ++rounds_;
}

Vec aggregate_of(const RoundAggregate& round) {
  if (round.parts.empty()) throw UsageError("aggregate_of: empty round");
  Vec agg(round.parts.front().update.size(), 0.0);
  for (const auto& part : round.parts) {
    if (part.update.size() != agg.size()) throw ConfigError("aggregate_of: shape mismatch");
    axpy(part.weight, part.update, agg);
  }
  return agg;
}

Vec expand_local(const std::vector<Vec>& grads, double decay, double step, int steps) {
  check_decay(decay);
  if (steps < 0 || static_cast<size_t>(steps) > grads.size())
    throw UsageError("expand_local: history shorter than requested step count");
  if (grads.empty()) return Vec();
  Vec disp(grads.front().size(), 0.0);
  if (steps == 0) return disp;
  for (int j = 1; j <= steps; ++j)
    axpy(-step * tail_weight(decay, steps + 1 - j), grads[static_cast<size_t>(j - 1)], disp);
  return disp;
}

Vec expand_global(const std::vector<RoundAggregate>& history, double decay, int rounds) {
  check_decay(decay);
  if (rounds < 0 || static_cast<size_t>(rounds) > history.size())
    throw UsageError("expand_global: history shorter than requested round count");
  if (history.empty()) return Vec();
  Vec buffer(history.front().parts.front().update.size(), 0.0);
  if (rounds == 0) return buffer;
  for (int s = 1; s <= rounds; ++s) {
    double coeff = std::pow(decay, rounds - s);
    for (const auto& part : history[static_cast<size_t>(s - 1)].parts)
      axpy(coeff * part.weight, part.update, buffer);
  }
  return buffer;
}

Vec expand_global_displacement(const std::vector<RoundAggregate>& history, double decay,
                               double step, int rounds) {
  check_decay(decay);
  if (rounds < 0 || static_cast<size_t>(rounds) > history.size())
    throw UsageError("expand_global_displacement: history shorter than requested round count");
  if (history.empty()) return Vec();
  Vec disp(history.front().parts.front().update.size(), 0.0);
  if (rounds == 0) return disp;
  for (int s = 1; s <= rounds; ++s) {
    double coeff = -step * tail_weight(decay, rounds - s + 1);
    for (const auto& part : history[static_cast<size_t>(s - 1)].parts)
      axpy(coeff * part.weight, part.update, disp);
  }
  return disp;
}

namespace {

std::map<int, Vec> split_by_client(const std::vector<RoundAggregate>& history, int rounds,
                                   auto coeff_for_round) {
  std::map<int, Vec> out;
  for (int s = 1; s <= rounds; ++s) {
    double coeff = coeff_for_round(s);
    for (const auto& part : history[static_cast<size_t>(s - 1)].parts) {
      auto [it, inserted] = out.try_emplace(part.client, Vec(part.update.size(), 0.0));
      axpy(coeff * part.weight, part.update, it->second);
    }
  }
  return out;
}

}  // namespace

std::map<int, Vec> expand_global_by_client(const std::vector<RoundAggregate>& history,
                                           double decay, int rounds) {
  check_decay(decay);
  if (rounds < 0 || static_cast<size_t>(rounds) > history.size())
    throw UsageError("expand_global_by_client: history shorter than requested round count");
  return split_by_client(history, rounds,
                         [&](int s) { return std::pow(decay, rounds - s); });
}

std::map<int, Vec> expand_global_displacement_by_client(const std::vector<RoundAggregate>& history,
                                                        double decay, double step, int rounds) {
  check_decay(decay);
  if (rounds < 0 || static_cast<size_t>(rounds) > history.size())
    throw UsageError(
        "expand_global_displacement_by_client: history shorter than requested round count");
  return split_by_client(history, rounds,
                         [&](int s) { return -step * tail_weight(decay, rounds - s + 1); });
}

}  // namespace cafe
