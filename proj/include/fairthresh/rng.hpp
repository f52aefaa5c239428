#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fairthresh {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

// Deterministic RNG with platform-stable uniform draws. Substreams of one
// master seed are derived by mixing in a stream label, so independent parts
// of a run (data generation, splitting, inference) never share draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}
  Rng(std::uint64_t master, std::string_view stream)
      : engine_(mix(master ^ detail::fnv1a64(stream))) {}

  std::uint64_t next() { return engine_(); }

  // Uniform draw in [0, 1) using the top 53 bits; avoids the
  // implementation-defined std::uniform_real_distribution.
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Unbiased integer in [0, n).
  std::size_t index(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return static_cast<std::size_t>(v % n);
  }

 private:
  static std::mt19937_64 mix(std::uint64_t seed) {
    std::uint64_t s = seed;
    // One round of splitmix decorrelates adjacent master seeds.
    return std::mt19937_64(detail::splitmix64(s));
  }

  std::mt19937_64 engine_;
};

}  // namespace fairthresh
