#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "ccrrt/constraints.hpp"

namespace ccrrt {

/// Monte-Carlo estimate of an event probability with its binomial
/// standard error.
struct MCReport {
  long long samples = 0;
  long long hits = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

MCReport make_report(long long samples, long long hits, std::uint64_t seed);

/// Samples X ~ N(mu, Sigma) through the symmetric covariance square root
/// and counts how often X stays inside the alpha risk ellipse; the estimate
/// converges to 1 - alpha. Work splits into `chunks` independently seeded
/// blocks (chunk i uses seed + i) evaluated in parallel; the merged count
/// equals a sequential run over the same schedule.
MCReport coverage_check(const Gaussian2d& g, double alpha, long long n, std::uint64_t seed,
                        int chunks = 1);

/// Empirical per-step collision risk of a path. At step t (seeded seed + t)
/// the positions of all obstacles are jointly resampled n times; a sample
/// collides when some realized obstacle position lies within the
/// alpha-critical Mahalanobis distance of the path vertex. Reports the
/// worst step; for certified paths the union bound caps it at delta.
MCReport path_risk_check(const std::vector<Eigen::Vector2d>& path, const ObstacleField& field,
                         long long n_per_step, std::uint64_t seed);

}  // namespace ccrrt
