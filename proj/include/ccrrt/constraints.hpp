#pragma once

#include <Eigen/Core>
#include <map>
#include <vector>

#include "ccrrt/probability.hpp"

namespace ccrrt {

/// Axis-aligned sampling bounds, lower < upper componentwise.
struct Workspace {
  Eigen::Vector2d lower;
  Eigen::Vector2d upper;
};

inline bool contains(const Workspace& ws, const Eigen::Vector2d& p) {
  return (p.array() >= ws.lower.array()).all() && (p.array() <= ws.upper.array()).all();
}

/// Mission collision budget delta split uniformly over obstacles, so that
/// num_obstacles * alpha <= delta always holds.
struct RiskConfig {
  double delta = 0.0;
  int num_obstacles = 0;
  double alpha = 0.0;
};

/// alpha = delta / num_obstacles (equality in the union bound).
RiskConfig allocate_risk(double delta, int num_obstacles);

/// The converse direction: explicit per-obstacle alpha, implied delta = B * alpha.
RiskConfig risk_from_alpha(double alpha, int num_obstacles);

/// Per-time-step mean offsets, piecewise constant: the offset at step t is
/// the entry with the largest key <= t (zero before the first key, the last
/// entry held forever after). An empty schedule is a static obstacle.
class MotionSchedule {
 public:
  MotionSchedule() = default;
  explicit MotionSchedule(std::map<int, Eigen::Vector2d> offsets)
      : offsets_(std::move(offsets)) {}

  Eigen::Vector2d offset_at(int t) const {
    auto it = offsets_.upper_bound(t);
    if (it == offsets_.begin()) return Eigen::Vector2d::Zero();
    return std::prev(it)->second;
  }

  bool empty() const { return offsets_.empty(); }
  const std::map<int, Eigen::Vector2d>& entries() const { return offsets_; }

 private:
  std::map<int, Eigen::Vector2d> offsets_;
};

struct UncertainObstacle {
  Gaussian2d gaussian;
  MotionSchedule schedule;

  Eigen::Vector2d mean_at(int t) const { return gaussian.mean() + schedule.offset_at(t); }
};

/// Immutable set of Gaussian obstacles plus the risk allocation that turns
/// them into deterministic ellipse constraints. The chi-square critical
/// value is cached at construction.
class ObstacleField {
 public:
  ObstacleField(std::vector<UncertainObstacle> obstacles, RiskConfig risk);

  const std::vector<UncertainObstacle>& obstacles() const { return obstacles_; }
  const RiskConfig& risk() const { return risk_; }

  /// F^{-1}(1 - alpha, 2); 0 for an empty field.
  double threshold() const { return threshold_; }

  /// True when any obstacle carries a nonempty motion schedule.
  bool dynamic() const { return dynamic_; }

 private:
  std::vector<UncertainObstacle> obstacles_;
  RiskConfig risk_;
  double threshold_ = 0.0;
  bool dynamic_ = false;
};

/// Minimum of the Mahalanobis quadratic along segment p->q against a single
/// Gaussian with the given mean. Closed form: the quadratic in the segment
/// parameter is minimized at its clamped stationary point.
double segment_min_mahalanobis_sq(const Gaussian2d& g, const Eigen::Vector2d& mean,
                                  const Eigen::Vector2d& p, const Eigen::Vector2d& q);

/// Conjunction over obstacles of mahalanobis_sq(x) > threshold at step t.
/// Boundary points are infeasible; an empty field is vacuously feasible.
bool point_feasible(const ObstacleField& field, const Eigen::Vector2d& x, int t = 0);

/// Every point of segment p->q is feasible at step t (exact, no sampling).
bool segment_feasible(const ObstacleField& field, const Eigen::Vector2d& p,
                      const Eigen::Vector2d& q, int t = 0);

/// The a-priori union-bound certificate: B * alpha at feasible points,
/// 1 when the point violates a constraint, 0 for an empty field.
double collision_prob_bound(const ObstacleField& field, const Eigen::Vector2d& x, int t = 0);

}  // namespace ccrrt
