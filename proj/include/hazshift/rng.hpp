#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hazshift {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Collision-resistant seed for a named substream. Streams derived from the
// same (seed, stream, salt) triple are identical; any component change gives
// an unrelated stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ salt);
}

// Deterministic draw stream. The engine is the fully specified mt19937_64 and
// all distribution transforms are explicit, so the value sequence depends on
// the seed alone, never on the standard library's distribution classes.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  // Uniform strictly inside (0,1).
  double uniform() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }

  // Exp(1); strictly positive because uniform() never returns 0.
  double exponential() { return -std::log(uniform()); }

  // N(0,1) via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi * u2);
    has_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hazshift
