#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ccrrt/export.hpp"
#include "ccrrt/scenario.hpp"
#include "ccrrt/validation.hpp"

namespace fs = std::filesystem;
using namespace ccrrt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoPath = 2;
constexpr int kExitBudget = 3;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// "a..b" inclusive.
std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto sep = text.find("..");
  if (sep == std::string::npos) throw std::runtime_error("--seeds expects the form a..b");
  const std::uint64_t a = std::stoull(text.substr(0, sep));
  const std::uint64_t b = std::stoull(text.substr(sep + 2));
  if (b < a) throw std::runtime_error("--seeds range is reversed");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
  return seeds;
}

struct Flags {
  std::string scenario;
  std::string out = ".";
  std::string variant;
  std::string seeds_range;
  std::string path_file;
  std::vector<std::string> agents;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int iterations = -1;
  long long samples = 10000;
  double agent_cov = 0.05;
  bool svg = false;
};

PlannerParams resolve_params(const Scenario& s, const Flags& f, std::uint64_t seed) {
  PlannerParams params = s.planner;
  params.seed = seed;
  if (f.iterations >= 0) params.max_iterations = f.iterations;
  if (f.variant == "rrt") params.variant = Variant::rrt;
  if (f.variant == "rrt_star") params.variant = Variant::rrt_star;
  return params;
}

int run_plan(const Flags& f) {
  const fs::path out_dir(f.out);
  fs::create_directories(out_dir);

  if (!f.agents.empty()) {
    std::vector<AgentProblem> problems;
    std::vector<Scenario> scenarios;
    for (const auto& path : f.agents) {
      scenarios.push_back(load_scenario(path));
      Scenario& s = scenarios.back();
      AgentProblem prob = agent_problem(s);
      prob.params = resolve_params(s, f, f.seed_given ? f.seed : s.planner.seed);
      problems.push_back(std::move(prob));
    }
    const Eigen::Matrix2d cov = f.agent_cov * Eigen::Matrix2d::Identity();
    const auto results = plan_multiagent(problems, cov);

    bool all_found = true;
    for (std::size_t k = 0; k < results.size(); ++k) {
      const std::string stem =
          "agent" + std::to_string(k) + "_result_seed" + std::to_string(results[k].seed);
      write_file(out_dir / (stem + ".json"), to_json(results[k]));
      if (f.svg) {
        const ObstacleField field(problems[k].obstacles,
                                  problems[k].obstacles.empty()
                                      ? RiskConfig{problems[k].delta, 0, problems[k].delta}
                                      : allocate_risk(problems[k].delta,
                                                      static_cast<int>(problems[k].obstacles.size())));
        write_file(out_dir / (stem + ".svg"), to_svg(results[k], field, problems[k].workspace));
      }
      if (!results[k].best_path) all_found = false;
    }
    return all_found ? kExitOk : kExitNoPath;
  }

  if (f.scenario.empty()) {
    std::cerr << "plan: --scenario (or --agents) is required\n";
    return kExitUsage;
  }
  const Scenario s = load_scenario(f.scenario);
  const ObstacleField field = make_field(s);

  std::vector<std::uint64_t> seeds;
  if (!f.seeds_range.empty()) {
    seeds = parse_seed_range(f.seeds_range);
  } else {
    seeds.push_back(f.seed_given ? f.seed : s.planner.seed);
  }

  bool all_found = true;
  for (const std::uint64_t seed : seeds) {
    const PlanResult result = plan(s, resolve_params(s, f, seed));
    const std::string stem = "result_seed" + std::to_string(seed);
    write_file(out_dir / (stem + ".json"), to_json(result));
    if (f.svg) write_file(out_dir / (stem + ".svg"), to_svg(result, field, s.workspace));
    if (!result.best_path) all_found = false;
  }
  return all_found ? kExitOk : kExitNoPath;
}

int run_validate(const Flags& f) {
  if (f.scenario.empty()) {
    std::cerr << "validate: --scenario is required\n";
    return kExitUsage;
  }
  const fs::path out_dir(f.out);
  fs::create_directories(out_dir);

  const Scenario s = load_scenario(f.scenario);
  const ObstacleField field = make_field(s);
  const std::uint64_t seed = f.seed_given ? f.seed : s.planner.seed;

  ValidationSummary summary;
  summary.delta = s.risk.delta;
  for (std::size_t i = 0; i < field.obstacles().size(); ++i) {
    summary.coverage.push_back(coverage_check(field.obstacles()[i].gaussian, field.risk().alpha,
                                              f.samples, seed + i));
  }

  std::optional<std::vector<Eigen::Vector2d>> path;
  if (!f.path_file.empty()) {
    path = load_path_json(slurp(f.path_file));
  } else {
    const PlanResult result = plan(s, resolve_params(s, f, seed));
    if (result.best_path) path = result.best_path;
  }
  if (!path) {
    write_file(out_dir / "report.json", to_json(summary));
    std::cerr << "validate: no path available to check\n";
    return kExitNoPath;
  }

  summary.path_risk = path_risk_check(*path, field, f.samples, seed);
  summary.budget_ok =
      summary.path_risk->estimate <= summary.delta + 3.0 * summary.path_risk->std_error;

  Eigen::VectorXd x0(2);
  x0 = (*path)[0];
  const auto rolled = rollout(single_integrator(), x0, inputs_from_waypoints(*path), s.goal);
  summary.rollout_t_goal = rolled.t_goal;

  write_file(out_dir / "report.json", to_json(summary));
  return summary.budget_ok ? kExitOk : kExitBudget;
}

int run_ellipses(const Flags& f) {
  if (f.scenario.empty()) {
    std::cerr << "ellipses: --scenario is required\n";
    return kExitUsage;
  }
  const fs::path out_dir(f.out);
  fs::create_directories(out_dir);
  const Scenario s = load_scenario(f.scenario);
  write_file(out_dir / "ellipses.json", ellipses_json(make_field(s)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chance-constrained RRT*/RRT planner over Gaussian obstacle fields"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&f](CLI::App* cmd) {
    cmd->add_option("--scenario", f.scenario, "Scenario JSON file");
    cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
    cmd->add_option("--seed", f.seed, "PRNG seed (overrides the scenario)");
  };

  CLI::App* plan_cmd = app.add_subcommand("plan", "Plan a path and write the result JSON");
  add_common(plan_cmd);
  plan_cmd->add_option("--seeds", f.seeds_range, "Inclusive seed range a..b, one result per seed");
  plan_cmd->add_option("--variant", f.variant, "rrt or rrt_star")
      ->check(CLI::IsMember({"rrt", "rrt_star"}));
  plan_cmd->add_option("--iterations", f.iterations, "Override max_iterations");
  plan_cmd->add_option("--agents", f.agents,
                       "Agent scenario files; priority equals argument order");
  plan_cmd->add_option("--agent-cov", f.agent_cov,
                       "Isotropic position variance modelling other agents")
      ->capture_default_str();
  plan_cmd->add_flag("--svg", f.svg, "Also write an SVG rendering");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Monte-Carlo check of coverage and path risk");
  add_common(validate_cmd);
  validate_cmd->add_option("--path", f.path_file,
                           "Path to validate (result JSON or [[x,y],...]); default: plan first");
  validate_cmd->add_option("--samples", f.samples, "Samples per estimate")
      ->capture_default_str();

  CLI::App* ellipses_cmd =
      app.add_subcommand("ellipses", "Write each obstacle's risk ellipse as a 64-point polyline");
  add_common(ellipses_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }
  for (CLI::App* cmd : {plan_cmd, validate_cmd, ellipses_cmd}) {
    if (cmd->parsed() && cmd->count("--seed") > 0) f.seed_given = true;
  }

  try {
    if (plan_cmd->parsed()) return run_plan(f);
    if (validate_cmd->parsed()) return run_validate(f);
    if (ellipses_cmd->parsed()) return run_ellipses(f);
  } catch (const InfeasibleStartError& e) {
    std::cerr << "error: infeasible start: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
