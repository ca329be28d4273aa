#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccrrt/planner.hpp"
#include "ccrrt/scenario.hpp"
#include "ccrrt/validation.hpp"

namespace ccrrt {

// All writers emit numbers as decimal with 17 significant digits, so equal
// results serialize to byte-identical files and doubles survive a round trip.

std::string to_json(const PlanResult& result);
std::string to_json(const MCReport& report);

/// Combined report of the validate run: one coverage report per obstacle,
/// the path risk report, the budget verdict and the LTI rollout summary.
struct ValidationSummary {
  std::vector<MCReport> coverage;
  std::optional<MCReport> path_risk;
  double delta = 0.0;
  bool budget_ok = true;
  std::optional<int> rollout_t_goal;
};

std::string to_json(const ValidationSummary& summary);

/// Per-obstacle risk ellipses as 64-point boundary polylines.
std::string ellipses_json(const ObstacleField& field);

/// Tree, risk ellipses and best path as a standalone SVG document
/// (viewBox = workspace bounds, y axis flipped to point up).
std::string to_svg(const PlanResult& result, const ObstacleField& field, const Workspace& ws);

/// Reload of a result document written by to_json(PlanResult).
struct LoadedResult {
  std::optional<std::vector<Eigen::Vector2d>> best_path;
  std::optional<double> cost;
  std::uint64_t seed = 0;
  int node_count = 0;
};

LoadedResult load_result_json(const std::string& text);

/// Accepts either a result document or a bare [[x, y], ...] array.
std::vector<Eigen::Vector2d> load_path_json(const std::string& text);

}  // namespace ccrrt
