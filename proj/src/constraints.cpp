#include "ccrrt/constraints.hpp"

#include <stdexcept>
#include <utility>

namespace ccrrt {

RiskConfig allocate_risk(double delta, int num_obstacles) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("allocate_risk: delta must lie in (0, 1)");
  }
  if (num_obstacles < 1) {
    throw std::domain_error("allocate_risk: need at least one obstacle");
  }
  return RiskConfig{delta, num_obstacles, delta / num_obstacles};
}

RiskConfig risk_from_alpha(double alpha, int num_obstacles) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("risk_from_alpha: alpha must lie in (0, 1)");
  }
  if (num_obstacles < 1) {
    throw std::domain_error("risk_from_alpha: need at least one obstacle");
  }
  const double delta = num_obstacles * alpha;
  if (!(delta < 1.0)) {
    throw std::domain_error("risk_from_alpha: implied delta = B * alpha reaches 1");
  }
  return RiskConfig{delta, num_obstacles, alpha};
}

ObstacleField::ObstacleField(std::vector<UncertainObstacle> obstacles, RiskConfig risk)
    : obstacles_(std::move(obstacles)), risk_(risk) {
  if (risk_.num_obstacles != static_cast<int>(obstacles_.size())) {
    throw std::invalid_argument("ObstacleField: risk.num_obstacles mismatches obstacle count");
  }
  if (!obstacles_.empty()) {
    if (!(risk_.alpha > 0.0 && risk_.alpha < 1.0)) {
      throw std::invalid_argument("ObstacleField: alpha must lie in (0, 1)");
    }
    // Allow one-ulp slack: alpha = delta / B rounds.
    if (risk_.num_obstacles * risk_.alpha > risk_.delta * (1.0 + 1e-12)) {
      throw std::invalid_argument("ObstacleField: B * alpha exceeds delta");
    }
    threshold_ = chi2_inv(ChiSquareDist{2}, 1.0 - risk_.alpha);
  }
  for (const auto& ob : obstacles_) {
    if (!ob.schedule.empty()) dynamic_ = true;
  }
}

double segment_min_mahalanobis_sq(const Gaussian2d& g, const Eigen::Vector2d& mean,
                                  const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
  const Eigen::Matrix2d& si = g.covariance_inverse();
  const Eigen::Vector2d w = p - mean;
  const Eigen::Vector2d v = q - p;
  const double a = v.dot(si * v);
  const double b = w.dot(si * v);
  const double c = w.dot(si * w);
  if (a <= 0.0) return c;  // degenerate segment
  double s = -b / a;
  if (s < 0.0) s = 0.0;
  if (s > 1.0) s = 1.0;
  return a * s * s + 2.0 * b * s + c;
}

bool point_feasible(const ObstacleField& field, const Eigen::Vector2d& x, int t) {
  const double tau = field.threshold();
  for (const auto& ob : field.obstacles()) {
    const Eigen::Vector2d d = x - ob.mean_at(t);
    if (d.dot(ob.gaussian.covariance_inverse() * d) <= tau) return false;
  }
  return true;
}

bool segment_feasible(const ObstacleField& field, const Eigen::Vector2d& p,
                      const Eigen::Vector2d& q, int t) {
  const double tau = field.threshold();
  for (const auto& ob : field.obstacles()) {
    if (segment_min_mahalanobis_sq(ob.gaussian, ob.mean_at(t), p, q) <= tau) return false;
  }
  return true;
}

double collision_prob_bound(const ObstacleField& field, const Eigen::Vector2d& x, int t) {
  if (field.obstacles().empty()) return 0.0;
  if (!point_feasible(field, x, t)) return 1.0;
  return field.risk().num_obstacles * field.risk().alpha;
}

}  // namespace ccrrt
