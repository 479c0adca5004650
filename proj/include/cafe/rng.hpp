#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace cafe {

// All randomness in a run flows from one master seed. Components derive
// private substreams with derive_seed(master, tag, a, b), so the draw order
// inside one component never disturbs another. Substreams in use:
//
//   "data"             dataset synthesis
//   "init"             model parameter initialization
//   "partition"        Dirichlet label partition
//   "select", r        round-r client selection (pool draw + availability)
//   "client", r, k     batch sampling for client k in round r
//
// Distribution transforms are hand-rolled (the standard library leaves them
// implementation-defined), so a (seed, call sequence) pair maps to the same
// values everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // standard normal via Box-Muller; consumes two engine draws per call and
  // keeps no cached spare, so the draw count per call is fixed
  double normal();

  // uniform integer in [0, n); n > 0
  int uniform_int(int n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(static_cast<int>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from [0, n), returned ascending
  std::vector<int> sample_without_replacement(int k, int n);

  std::string serialize_state() const;
  void restore_state(const std::string& s);

 private:
  std::mt19937_64 engine_;
};

// Deterministic substream seed from a master seed, a purpose tag, and up to
// two indices.
uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t a = 0, uint64_t b = 0);

}  // namespace cafe
