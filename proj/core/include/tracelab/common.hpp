#pragma once

// Shared plumbing: error type, deterministic RNG, small integer helpers.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tracelab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

// SplitMix64. Chosen over std::mt19937 because the output sequence is fixed by
// the algorithm, not by library internals, so results reproduce across
// platforms and seeding a fresh stream per work item is cheap.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; two uniforms per call, no cached spare (keeps streams simple).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Uniform integer in [0, n).
  int below(int n) { return int(next_u64() % uint64_t(n)); }

 private:
  uint64_t state_;
};

// Stream seed for work item `index` under master seed `seed`.  Used so that a
// parallel sweep produces identical samples regardless of worker count.
inline uint64_t substream_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline int64_t ipow(int64_t base, int exp) {
  int64_t r = 1;
  for (; exp > 0; --exp) r *= base;
  return r;
}

}  // namespace tracelab
