#include "cafe/rng.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace cafe {

double Rng::normal() {
  double u1 = uniform();
  double u2 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::uniform_int(int n) {
  assert(n > 0);
  // multiply-shift map of a 64-bit draw onto [0, n); bias is below 2^-32 for
  // the n used here
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * static_cast<uint64_t>(n);
  return static_cast<int>(m >> 64);
}

std::vector<int> Rng::sample_without_replacement(int k, int n) {
  assert(k >= 0 && k <= n);
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    int j = i + uniform_int(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::string Rng::serialize_state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::restore_state(const std::string& s) {
  std::istringstream is(s);
  is >> engine_;
}

namespace {

uint64_t splitmix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t a, uint64_t b) {
  uint64_t h = splitmix(master ^ fnv1a(tag));
  h = splitmix(h ^ a);
  h = splitmix(h ^ b);
  return h;
}

}  // namespace cafe
