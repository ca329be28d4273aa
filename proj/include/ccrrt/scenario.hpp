#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "ccrrt/constraints.hpp"
#include "ccrrt/dynamics.hpp"
#include "ccrrt/planner.hpp"

namespace ccrrt {

/// A complete planning problem as read from a scenario file. Risk and
/// planner parameters are fully resolved (defaults applied, delta/alpha
/// both populated, planner.goal mirroring goal).
struct Scenario {
  Workspace workspace;
  std::vector<UncertainObstacle> obstacles;
  RiskConfig risk;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  GoalRegion goal;
  PlannerParams planner;
  PenaltySpec penalty;
};

enum class ScenarioErrorKind { io, parse, schema, invariant };

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(ScenarioErrorKind kind, std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        kind_(kind),
        field_(std::move(field)) {}

  ScenarioErrorKind kind() const { return kind_; }
  const std::string& field() const { return field_; }

 private:
  ScenarioErrorKind kind_;
  std::string field_;
};

/// Parses and validates a scenario document. Violations report the
/// offending field path, e.g. "obstacles[2].covariance".
Scenario parse_scenario(const std::string& json_text);

Scenario load_scenario(const std::filesystem::path& path);

ObstacleField make_field(const Scenario& s);

AgentProblem agent_problem(const Scenario& s);

PlanResult plan(const Scenario& s);
PlanResult plan(const Scenario& s, const PlannerParams& params);

}  // namespace ccrrt
