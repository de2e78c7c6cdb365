#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "butterfly/units.hpp"

namespace bfm {

/// SplitMix64 step (Steele et al.), used to derive well-separated stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for an independent stream identified by (master, index).
/// Every Monte Carlo loop in this library derives per-item streams this way,
/// so any single realization can be reconstructed in isolation.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x51AB13ULL));
}

/// Deterministic Gaussian stream: mt19937_64 + single-branch Box-Muller.
///
/// std::normal_distribution is implementation-defined, so it cannot back a
/// byte-reproducible output contract. This stream consumes exactly two engine
/// words per sample:
///   u1 = 1 - (eng() >> 11) * 2^-53   in (0, 1]
///   u2 =     (eng() >> 11) * 2^-53   in [0, 1)
///   z  = sqrt(-2 ln u1) * cos(2 pi u2)
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  double next() {
    const double u1 = 1.0 - to_unit(eng_());
    const double u2 = to_unit(eng_());
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double next(double sigma) { return sigma * next(); }

  std::uint64_t next_word() { return eng_(); }

 private:
  static double to_unit(std::uint64_t w) { return static_cast<double>(w >> 11) * 0x1.0p-53; }
  std::mt19937_64 eng_;
};

}  // namespace bfm
