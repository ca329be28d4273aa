#include "ccrrt/dynamics.hpp"

#include <cmath>
#include <limits>

namespace ccrrt {

StepResult lti_step(const LTIModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                    const InputConstraint* box) {
  if (m.A.rows() != m.A.cols()) throw std::invalid_argument("lti_step: A must be square");
  if (m.B.rows() != m.A.rows()) throw std::invalid_argument("lti_step: B row count mismatches A");
  if (m.C.cols() != m.A.cols()) throw std::invalid_argument("lti_step: C column count mismatches A");
  if (x.size() != m.A.cols()) throw std::invalid_argument("lti_step: state dimension mismatch");
  if (u.size() != m.B.cols()) throw std::invalid_argument("lti_step: input dimension mismatch");
  if (box != nullptr) {
    if (box->lower.size() != u.size() || box->upper.size() != u.size()) {
      throw std::invalid_argument("lti_step: constraint dimension mismatch");
    }
    if ((box->lower.array() > box->upper.array()).any()) {
      throw std::invalid_argument("lti_step: constraint box has lower > upper");
    }
    if ((u.array() < box->lower.array()).any() || (u.array() > box->upper.array()).any()) {
      throw ConstraintViolation("lti_step: input outside constraint box");
    }
  }
  return {m.A * x + m.B * u, m.C * x};
}

RolloutResult rollout(const LTIModel& m, const Eigen::VectorXd& x0,
                      const std::vector<Eigen::VectorXd>& inputs, const GoalRegion& goal,
                      const InputConstraint* box) {
  RolloutResult out;
  out.states.reserve(inputs.size() + 1);
  out.states.push_back(x0);
  if (x0.size() < 2) throw std::invalid_argument("rollout: state needs position components");
  if (in_goal(goal, x0.head<2>())) out.t_goal = 0;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    out.states.push_back(lti_step(m, out.states.back(), inputs[t], box).next);
    if (!out.t_goal && in_goal(goal, out.states.back().head<2>())) {
      out.t_goal = static_cast<int>(t) + 1;
    }
  }
  return out;
}

double penalty_at(const PenaltySpec& spec, const Eigen::Vector2d& pos,
                  const ObstacleField* field, int t) {
  if (spec.kind == PenaltyKind::none) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  if (field != nullptr) {
    for (const auto& ob : field->obstacles()) {
      const Eigen::Vector2d d = pos - ob.mean_at(t);
      m = std::min(m, d.dot(ob.gaussian.covariance_inverse() * d) - field->threshold());
    }
  }
  return spec.weight * std::max(0.0, spec.margin - m);
}

double objective(const std::vector<Eigen::VectorXd>& states, int t_goal,
                 const PenaltySpec& penalty, const ObstacleField* field) {
  if (t_goal < 0 || t_goal >= static_cast<int>(states.size())) {
    throw std::invalid_argument("objective: t_goal outside the state sequence");
  }
  for (const auto& s : states) {
    if (s.size() < 2) throw std::invalid_argument("objective: states need position components");
  }
  double j = t_goal;
  for (int t = 0; t <= t_goal; ++t) {
    j += penalty_at(penalty, states[t].head<2>(), field, t);
  }
  return j;
}

LTIModel single_integrator() {
  return {Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity(),
          Eigen::Matrix2d::Identity()};
}

std::vector<Eigen::VectorXd> inputs_from_waypoints(const std::vector<Eigen::Vector2d>& path) {
  std::vector<Eigen::VectorXd> inputs;
  if (path.size() < 2) return inputs;
  inputs.reserve(path.size() - 1);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    inputs.push_back(path[i + 1] - path[i]);
  }
  return inputs;
}

}  // namespace ccrrt
