#include "ccrrt/validation.hpp"

#include <cmath>
#include <future>
#include <stdexcept>

#include "ccrrt/rng.hpp"

namespace ccrrt {

MCReport make_report(long long samples, long long hits, std::uint64_t seed) {
  if (samples < 1) throw std::domain_error("make_report: need at least one sample");
  MCReport r;
  r.samples = samples;
  r.hits = hits;
  r.seed = seed;
  r.estimate = static_cast<double>(hits) / static_cast<double>(samples);
  r.std_error = std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(samples));
  return r;
}

namespace {

long long coverage_chunk(const Gaussian2d& g, double threshold, long long n,
                         std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Matrix2d root = sqrt_spd(g.covariance());
  long long hits = 0;
  for (long long i = 0; i < n; ++i) {
    const Eigen::Vector2d x = g.mean() + root * rng.normal_pair();
    if (mahalanobis_sq(g, x) <= threshold) ++hits;
  }
  return hits;
}

}  // namespace

MCReport coverage_check(const Gaussian2d& g, double alpha, long long n, std::uint64_t seed,
                        int chunks) {
  if (n < 1) throw std::domain_error("coverage_check: need at least one sample");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::domain_error("coverage_check: alpha must lie in (0, 1]");
  }
  if (chunks < 1) throw std::domain_error("coverage_check: need at least one chunk");
  const double threshold = chi2_inv(ChiSquareDist{2}, 1.0 - alpha);

  std::vector<std::future<long long>> futures;
  futures.reserve(chunks);
  const long long base = n / chunks;
  for (int i = 0; i < chunks; ++i) {
    const long long count = base + (i < n % chunks ? 1 : 0);
    futures.push_back(std::async(std::launch::async, coverage_chunk, std::cref(g), threshold,
                                 count, seed + static_cast<std::uint64_t>(i)));
  }
  long long hits = 0;
  for (auto& f : futures) hits += f.get();
  return make_report(n, hits, seed);
}

MCReport path_risk_check(const std::vector<Eigen::Vector2d>& path, const ObstacleField& field,
                         long long n_per_step, std::uint64_t seed) {
  if (path.empty()) throw std::domain_error("path_risk_check: path must be nonempty");
  if (n_per_step < 1) throw std::domain_error("path_risk_check: need at least one sample");

  const double threshold = field.threshold();
  const auto& obstacles = field.obstacles();
  std::vector<Eigen::Matrix2d> roots;
  roots.reserve(obstacles.size());
  for (const auto& ob : obstacles) roots.push_back(sqrt_spd(ob.gaussian.covariance()));

  long long worst = 0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    Rng rng(seed + static_cast<std::uint64_t>(t));
    long long collisions = 0;
    for (long long i = 0; i < n_per_step; ++i) {
      bool collided = false;
      // No early exit: every sample consumes one normal pair per obstacle,
      // keeping the draw schedule independent of outcomes.
      for (std::size_t k = 0; k < obstacles.size(); ++k) {
        const Eigen::Vector2d realized =
            obstacles[k].mean_at(static_cast<int>(t)) + roots[k] * rng.normal_pair();
        const Eigen::Vector2d d = path[t] - realized;
        const double m2 = d.dot(obstacles[k].gaussian.covariance_inverse() * d);
        if (m2 <= threshold) {
          collided = true;
        }
      }
      if (collided) ++collisions;
    }
    worst = std::max(worst, collisions);
  }
  return make_report(n_per_step, worst, seed);
}

}  // namespace ccrrt
