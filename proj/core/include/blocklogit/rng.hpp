#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace blocklogit {

// 64-bit FNV-1a, used for stream tags and config hashes.
inline std::uint64_t fnv1a(std::string_view bytes,
                           std::uint64_t h = 14695981039346656037ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic splittable RNG. Every stochastic component derives its own
// stream from a single base seed via split(tag, index); the draw sequence of
// one stream never depends on how much another stream consumed. Samplers are
// hand-rolled on top of mt19937_64 so output is identical across standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key), engine_(splitmix64(key)) {}

  // child key = splitmix64(parent_key ^ fnv1a(tag) + (index+1) * golden ratio)
  Rng split(std::string_view tag, std::uint64_t index = 0) const {
    std::uint64_t k = key_ ^ fnv1a(tag);
    k += (index + 1) * 0x9E3779B97F4A7C15ULL;
    return Rng(splitmix64(k));
  }

  std::uint64_t derived_seed(std::string_view tag, std::uint64_t index = 0) const {
    return split(tag, index).key();
  }

  std::uint64_t key() const noexcept { return key_; }

  std::uint64_t next_u64() { return engine_(); }

  // uniform on [0, 1) with 53 random bits
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, n), unbiased via rejection
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller without caching; deterministic draw count per call
  double normal(double mean = 0.0, double sd = 1.0) {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double z =
        std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    return mean + sd * z;
  }

  // Knuth's method; adequate for the small means used here
  std::int64_t poisson(double lambda) {
    const double limit = std::exp(-lambda);
    std::int64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > limit);
    return k - 1;
  }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace blocklogit
