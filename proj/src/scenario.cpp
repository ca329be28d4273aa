#include "ccrrt/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ccrrt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(ScenarioErrorKind kind, const std::string& field,
                       const std::string& message) {
  throw ScenarioError(kind, field, message);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(ScenarioErrorKind::schema, path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ScenarioErrorKind::schema, path.empty() ? key : path + "." + key, "missing field");
  }
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(ScenarioErrorKind::schema, path, "expected a number");
  return v.get<double>();
}

Eigen::Vector2d vec2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) {
    fail(ScenarioErrorKind::schema, path, "expected an array of two numbers");
  }
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

Gaussian2d parse_gaussian(const json& v, const std::string& path) {
  const Eigen::Vector2d mean = vec2(require(v, "mean", path), path + ".mean");
  const json& cov = require(v, "covariance", path);
  if (!cov.is_array() || cov.size() != 4) {
    fail(ScenarioErrorKind::schema, path + ".covariance",
         "expected a row-major array of four numbers");
  }
  Eigen::Matrix2d sigma;
  sigma << number(cov[0], path + ".covariance[0]"), number(cov[1], path + ".covariance[1]"),
      number(cov[2], path + ".covariance[2]"), number(cov[3], path + ".covariance[3]");
  if (sigma(0, 1) != sigma(1, 0)) {
    fail(ScenarioErrorKind::invariant, path + ".covariance", "matrix is not symmetric");
  }
  try {
    return Gaussian2d(mean, sigma);
  } catch (const std::invalid_argument& e) {
    fail(ScenarioErrorKind::invariant, path + ".covariance", e.what());
  }
}

MotionSchedule parse_schedule(const json& v, const std::string& path) {
  if (!v.is_object()) fail(ScenarioErrorKind::schema, path, "expected an object");
  std::map<int, Eigen::Vector2d> offsets;
  for (auto it = v.begin(); it != v.end(); ++it) {
    int step = 0;
    try {
      std::size_t pos = 0;
      step = std::stoi(it.key(), &pos);
      if (pos != it.key().size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      fail(ScenarioErrorKind::schema, path, "keys must be integer time steps");
    }
    if (step < 0) fail(ScenarioErrorKind::invariant, path, "time steps must be nonnegative");
    offsets[step] = vec2(it.value(), path + "[\"" + it.key() + "\"]");
  }
  return MotionSchedule(std::move(offsets));
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ScenarioErrorKind::parse, "", e.what());
  }
  if (!doc.is_object()) fail(ScenarioErrorKind::schema, "", "top level must be an object");

  Scenario s;

  const json& ws = require(doc, "workspace", "");
  s.workspace.lower = vec2(require(ws, "lower", "workspace"), "workspace.lower");
  s.workspace.upper = vec2(require(ws, "upper", "workspace"), "workspace.upper");
  if (!(s.workspace.lower.x() < s.workspace.upper.x() &&
        s.workspace.lower.y() < s.workspace.upper.y())) {
    fail(ScenarioErrorKind::invariant, "workspace", "lower must be below upper componentwise");
  }

  const json& obs = require(doc, "obstacles", "");
  if (!obs.is_array()) fail(ScenarioErrorKind::schema, "obstacles", "expected an array");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string path = "obstacles[" + std::to_string(i) + "]";
    UncertainObstacle ob{parse_gaussian(obs[i], path), {}};
    if (obs[i].contains("schedule")) {
      ob.schedule = parse_schedule(obs[i]["schedule"], path + ".schedule");
    }
    s.obstacles.push_back(std::move(ob));
  }
  const int B = static_cast<int>(s.obstacles.size());

  const json& risk = require(doc, "risk", "");
  const bool has_delta = risk.contains("delta");
  const bool has_alpha = risk.contains("alpha");
  if (has_delta == has_alpha) {
    fail(ScenarioErrorKind::schema, "risk", "exactly one of delta or alpha is required");
  }
  try {
    if (has_delta) {
      const double delta = number(risk["delta"], "risk.delta");
      s.risk = B > 0 ? allocate_risk(delta, B) : RiskConfig{delta, 0, delta};
      if (B == 0 && !(delta > 0.0 && delta < 1.0)) {
        fail(ScenarioErrorKind::invariant, "risk.delta", "must lie in (0, 1)");
      }
    } else {
      const double alpha = number(risk["alpha"], "risk.alpha");
      if (B == 0) {
        fail(ScenarioErrorKind::invariant, "risk.alpha",
             "per-obstacle alpha needs at least one obstacle; use delta instead");
      }
      s.risk = risk_from_alpha(alpha, B);
    }
  } catch (const std::domain_error& e) {
    fail(ScenarioErrorKind::invariant, has_delta ? "risk.delta" : "risk.alpha", e.what());
  }

  s.start = vec2(require(doc, "start", ""), "start");
  if (!contains(s.workspace, s.start)) {
    fail(ScenarioErrorKind::invariant, "start", "must lie within the workspace");
  }

  const json& goal = require(doc, "goal", "");
  s.goal.center = vec2(require(goal, "center", "goal"), "goal.center");
  s.goal.radius = number(require(goal, "radius", "goal"), "goal.radius");
  if (!(s.goal.radius > 0.0)) {
    fail(ScenarioErrorKind::invariant, "goal.radius", "must be positive");
  }
  if (!contains(s.workspace, s.goal.center)) {
    fail(ScenarioErrorKind::invariant, "goal.center", "must lie within the workspace");
  }

  s.planner.goal = s.goal;
  if (doc.contains("planner")) {
    const json& p = doc["planner"];
    if (!p.is_object()) fail(ScenarioErrorKind::schema, "planner", "expected an object");
    if (p.contains("eta")) {
      s.planner.eta = number(p["eta"], "planner.eta");
      if (!(s.planner.eta > 0.0)) {
        fail(ScenarioErrorKind::invariant, "planner.eta", "must be positive");
      }
    }
    if (p.contains("gamma")) {
      s.planner.gamma = number(p["gamma"], "planner.gamma");
      if (!(s.planner.gamma > 0.0)) {
        fail(ScenarioErrorKind::invariant, "planner.gamma", "must be positive");
      }
    }
    if (p.contains("max_iterations")) {
      const double it = number(p["max_iterations"], "planner.max_iterations");
      if (it < 0 || it != static_cast<int>(it)) {
        fail(ScenarioErrorKind::invariant, "planner.max_iterations",
             "must be a nonnegative integer");
      }
      s.planner.max_iterations = static_cast<int>(it);
    }
    if (p.contains("goal_bias")) {
      s.planner.goal_bias = number(p["goal_bias"], "planner.goal_bias");
      if (!(s.planner.goal_bias >= 0.0 && s.planner.goal_bias < 1.0)) {
        fail(ScenarioErrorKind::invariant, "planner.goal_bias", "must lie in [0, 1)");
      }
    }
    if (p.contains("variant")) {
      const std::string v = p["variant"].is_string() ? p["variant"].get<std::string>() : "";
      if (v == "rrt") {
        s.planner.variant = Variant::rrt;
      } else if (v == "rrt_star") {
        s.planner.variant = Variant::rrt_star;
      } else {
        fail(ScenarioErrorKind::schema, "planner.variant", "expected \"rrt\" or \"rrt_star\"");
      }
    }
    if (p.contains("edge_cost")) {
      const std::string v = p["edge_cost"].is_string() ? p["edge_cost"].get<std::string>() : "";
      if (v == "euclidean") {
        s.planner.edge_cost = EdgeCostKind::euclidean;
      } else if (v == "unit_step") {
        s.planner.edge_cost = EdgeCostKind::unit_step;
      } else {
        fail(ScenarioErrorKind::schema, "planner.edge_cost",
             "expected \"euclidean\" or \"unit_step\"");
      }
    }
    if (p.contains("seed")) {
      if (!p["seed"].is_number_unsigned()) {
        fail(ScenarioErrorKind::schema, "planner.seed", "expected an unsigned integer");
      }
      s.planner.seed = p["seed"].get<std::uint64_t>();
    }
  }

  if (doc.contains("penalty")) {
    const json& p = doc["penalty"];
    const std::string kind = require(p, "kind", "penalty").is_string()
                                 ? p["kind"].get<std::string>()
                                 : "";
    if (kind == "none") {
      s.penalty.kind = PenaltyKind::none;
    } else if (kind == "clearance") {
      s.penalty.kind = PenaltyKind::clearance;
      if (p.contains("weight")) s.penalty.weight = number(p["weight"], "penalty.weight");
      if (p.contains("margin")) s.penalty.margin = number(p["margin"], "penalty.margin");
      if (s.penalty.weight < 0.0) {
        fail(ScenarioErrorKind::invariant, "penalty.weight", "must be nonnegative");
      }
    } else {
      fail(ScenarioErrorKind::schema, "penalty.kind", "expected \"none\" or \"clearance\"");
    }
  }

  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ScenarioErrorKind::io, "", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

ObstacleField make_field(const Scenario& s) { return ObstacleField(s.obstacles, s.risk); }

AgentProblem agent_problem(const Scenario& s) {
  return AgentProblem{s.workspace, s.obstacles, s.risk.delta, s.start, s.planner};
}

PlanResult plan(const Scenario& s) { return plan(s, s.planner); }

PlanResult plan(const Scenario& s, const PlannerParams& params) {
  return plan(s.workspace, make_field(s), s.start, params);
}

}  // namespace ccrrt
