#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ccrrt {

/// Deterministic random source used by every stochastic component.
///
/// The generator identity is part of the reproducibility contract: the
/// engine is std::mt19937_64 (bit-exact per the C++ standard) and all
/// variates are derived from its raw output with the explicit transforms
/// below, never through std::uniform_*_distribution (whose output is
/// implementation-defined). Same seed, same draw sequence, everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1) from the top 53 bits of one engine draw.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// One pair of independent standard normals (Box-Muller).
  /// Consumes exactly two uniform draws.
  Eigen::Vector2d normal_pair() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ccrrt
