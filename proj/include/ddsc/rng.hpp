#pragma once

#include <cstdint>
#include <cmath>

#include "ddsc/matrix.hpp"

namespace ddsc {

/// Deterministic 64-bit generator (splitmix64). Self-contained so that
/// simulated trajectories are byte-stable across standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller.
  double gaussian() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform on the radius-r ball in R^dim: uniform direction, radius r * U^(1/dim).
  Vector uniform_ball(int dim, double radius) {
    Vector v(dim);
    double norm = 0.0;
    do {
      for (int i = 0; i < dim; ++i) v(i) = gaussian();
      norm = v.norm();
    } while (norm == 0.0);
    const double r = radius * std::pow(uniform01(), 1.0 / dim);
    return v * (r / norm);
  }

 private:
  std::uint64_t state_;
};

/// Mixes a base seed with a time (or trial) index so that draws are
/// deterministic in (seed, k) independently of call order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::int64_t k) {
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 0x3c6ef372));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ddsc
