#pragma once

#include <Eigen/Core>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ccrrt/constraints.hpp"

namespace ccrrt {

/// Discrete-time LTI system x_{t+1} = A x_t + B u_t, y_t = C x_t.
struct LTIModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
};

/// Disc-shaped goal set over the position components.
struct GoalRegion {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
};

inline bool in_goal(const GoalRegion& g, const Eigen::Vector2d& pos) {
  return (pos - g.center).norm() <= g.radius;
}

/// Componentwise box constraint on inputs.
struct InputConstraint {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// Thrown when an input leaves its constraint box.
struct ConstraintViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepResult {
  Eigen::VectorXd next;
  Eigen::VectorXd output;
};

/// One LTI step. Dimension mismatches raise std::invalid_argument;
/// an input outside an attached box raises ConstraintViolation.
StepResult lti_step(const LTIModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                    const InputConstraint* box = nullptr);

struct RolloutResult {
  std::vector<Eigen::VectorXd> states;  // states[0] = x0, one more than inputs
  std::optional<int> t_goal;            // first index whose position is in the goal disc
};

/// Sequential rollout; t_goal = inf{ t : position(x_t) in goal }.
RolloutResult rollout(const LTIModel& m, const Eigen::VectorXd& x0,
                      const std::vector<Eigen::VectorXd>& inputs, const GoalRegion& goal,
                      const InputConstraint* box = nullptr);

enum class PenaltyKind { none, clearance };

/// Per-step state penalty. `none` is zero everywhere. `clearance` charges
/// weight * max(0, margin - m(x)) where m(x) is the minimum over obstacles
/// of mahalanobis_sq(x) - threshold, discouraging grazing trajectories.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::none;
  double weight = 0.0;
  double margin = 0.0;
};

double penalty_at(const PenaltySpec& spec, const Eigen::Vector2d& pos,
                  const ObstacleField* field, int t);

/// Objective J = t_goal + sum_{t=0}^{t_goal} phi(x_t).
double objective(const std::vector<Eigen::VectorXd>& states, int t_goal,
                 const PenaltySpec& penalty, const ObstacleField* field = nullptr);

/// Planar single integrator: A = B = C = I2.
LTIModel single_integrator();

/// Inputs that drive the single integrator through the waypoints:
/// u_t = p_{t+1} - p_t.
std::vector<Eigen::VectorXd> inputs_from_waypoints(const std::vector<Eigen::Vector2d>& path);

}  // namespace ccrrt
