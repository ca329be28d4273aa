#include "ccrrt/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ccrrt {

double default_gamma(const Workspace& ws) {
  const double area = (ws.upper - ws.lower).prod();
  return 2.0 * std::sqrt(3.0 * area / std::numbers::pi);
}

Tree::Tree(const Eigen::Vector2d& root) {
  nodes_.push_back(Node{0, root, -1, 0.0, 0, 0.0});
  children_.emplace_back();
}

int Tree::add_node(const Eigen::Vector2d& position, int parent, double edge) {
  const Node& p = nodes_.at(parent);
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{id, position, parent, p.cost + edge, p.depth + 1, edge});
  children_.emplace_back();
  children_[parent].push_back(id);
  return id;
}

void Tree::reparent(int id, int new_parent, double edge) {
  Node& n = nodes_.at(id);
  auto& old_siblings = children_.at(n.parent);
  old_siblings.erase(std::find(old_siblings.begin(), old_siblings.end(), id));
  n.parent = new_parent;
  n.edge_cost_in = edge;
  children_[new_parent].push_back(id);
  propagate(id);
}

void Tree::propagate(int id) {
  Node& n = nodes_[id];
  const Node& p = nodes_[n.parent];
  n.cost = p.cost + n.edge_cost_in;
  n.depth = p.depth + 1;
  for (int c : children_[id]) propagate(c);
}

std::vector<int> Tree::subtree(int id) const {
  std::vector<int> out;
  std::vector<int> stack{id};
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    out.push_back(cur);
    for (int c : children_[cur]) stack.push_back(c);
  }
  return out;
}

std::vector<Eigen::Vector2d> Tree::path_from_root(int id) const {
  std::vector<Eigen::Vector2d> path;
  for (int cur = id; cur >= 0; cur = nodes_[cur].parent) {
    path.push_back(nodes_[cur].position);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

double Tree::recompute_cost(int id) const {
  double c = 0.0;
  for (int cur = id; cur >= 0; cur = nodes_[cur].parent) {
    c += nodes_[cur].edge_cost_in;
  }
  return c;
}

Eigen::Vector2d sample(const Workspace& ws, const GoalRegion& goal,
                       const PlannerParams& params, Rng& rng) {
  if (rng.uniform01() < params.goal_bias) return goal.center;
  return {rng.uniform(ws.lower.x(), ws.upper.x()), rng.uniform(ws.lower.y(), ws.upper.y())};
}

int nearest(const Tree& tree, const Eigen::Vector2d& q) {
  if (tree.empty()) throw std::domain_error("nearest: tree is empty");
  int best = 0;
  double best_d2 = (tree.nodes()[0].position - q).squaredNorm();
  for (int i = 1; i < tree.size(); ++i) {
    const double d2 = (tree.nodes()[i].position - q).squaredNorm();
    if (d2 < best_d2) {
      best = i;
      best_d2 = d2;
    }
  }
  return best;
}

Eigen::Vector2d steer(const Eigen::Vector2d& from, const Eigen::Vector2d& to, double eta) {
  if (!(eta > 0.0)) throw std::domain_error("steer: eta must be positive");
  const Eigen::Vector2d d = to - from;
  const double len = d.norm();
  if (len <= eta) return to;
  return from + (eta / len) * d;
}

double near_radius(int n, double gamma, double eta) {
  if (n <= 1) return eta;
  return std::min(gamma * std::sqrt(std::log(static_cast<double>(n)) / n), eta);
}

std::vector<int> near(const Tree& tree, const Eigen::Vector2d& q_new, int n,
                      const PlannerParams& params) {
  if (!(params.gamma > 0.0)) {
    throw std::invalid_argument("near: gamma must be positive (see default_gamma)");
  }
  const double r = near_radius(n, params.gamma, params.eta);
  const double r2 = r * r;
  std::vector<int> out;
  for (const Node& node : tree.nodes()) {
    if ((node.position - q_new).squaredNorm() <= r2) out.push_back(node.id);
  }
  return out;
}

double edge_cost(EdgeCostKind kind, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return kind == EdgeCostKind::euclidean ? (a - b).norm() : 1.0;
}

namespace {

// A segment entering the tree at depth k must clear the obstacle positions
// at steps k and k+1. Static fields need a single check.
bool edge_feasible(const ObstacleField& field, int parent_depth, const Eigen::Vector2d& p,
                   const Eigen::Vector2d& q) {
  if (!segment_feasible(field, p, q, parent_depth)) return false;
  if (field.dynamic() && !segment_feasible(field, p, q, parent_depth + 1)) return false;
  return true;
}

// Re-verifies every edge below `id` assuming `id` moves to new_depth.
// Needed only for dynamic fields, where rewiring shifts time brackets.
bool subtree_edges_feasible_at(const Tree& tree, const ObstacleField& field, int id,
                               int new_depth) {
  struct Item {
    int node;
    int depth;
  };
  std::vector<Item> stack{{id, new_depth}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    for (int c : tree.children(it.node)) {
      if (!edge_feasible(field, it.depth, tree.node(it.node).position, tree.node(c).position)) {
        return false;
      }
      stack.push_back({c, it.depth + 1});
    }
  }
  return true;
}

}  // namespace

ExtendResult extend(Tree& tree, const Eigen::Vector2d& q, const ObstacleField& field,
                    const PlannerParams& params) {
  const int nearest_id = nearest(tree, q);
  const Eigen::Vector2d q_near_pos = tree.node(nearest_id).position;
  const Eigen::Vector2d q_new = steer(q_near_pos, q, params.eta);
  if ((q_new.array() == q_near_pos.array()).all()) return {};  // no progress toward a duplicate point
  if (!edge_feasible(field, tree.node(nearest_id).depth, q_near_pos, q_new)) return {};

  if (params.variant == Variant::rrt) {
    const int id = tree.add_node(q_new, nearest_id,
                                 edge_cost(params.edge_cost, q_near_pos, q_new));
    return {id};
  }

  const std::vector<int> near_ids = near(tree, q_new, tree.size(), params);

  // Parent selection: the nearest node is the incumbent, neighbors win only
  // by strict improvement (lowest id on equal cost).
  int q_min = nearest_id;
  double c_min = tree.node(nearest_id).cost + edge_cost(params.edge_cost, q_near_pos, q_new);
  for (int id : near_ids) {
    if (id == nearest_id) continue;
    const Node& cand = tree.node(id);
    const double c = cand.cost + edge_cost(params.edge_cost, cand.position, q_new);
    if (c < c_min && edge_feasible(field, cand.depth, cand.position, q_new)) {
      q_min = id;
      c_min = c;
    }
  }
  const int new_id =
      tree.add_node(q_new, q_min, edge_cost(params.edge_cost, tree.node(q_min).position, q_new));

  // Rewire neighbors through the new node, ancestors before descendants so
  // every node compares against its final upstream cost.
  std::vector<int> order;
  order.reserve(near_ids.size());
  for (int id : near_ids) {
    if (id != q_min) order.push_back(id);
  }
  std::sort(order.begin(), order.end(), [&tree](int a, int b) {
    const int da = tree.node(a).depth, db = tree.node(b).depth;
    return da != db ? da < db : a < b;
  });

  const Node& fresh = tree.node(new_id);
  for (int id : order) {
    const Node& n = tree.node(id);
    const double edge = edge_cost(params.edge_cost, fresh.position, n.position);
    if (fresh.cost + edge >= n.cost) continue;
    if (!edge_feasible(field, fresh.depth, fresh.position, n.position)) continue;
    if (field.dynamic() && n.depth != fresh.depth + 1 &&
        !subtree_edges_feasible_at(tree, field, id, fresh.depth + 1)) {
      continue;  // the shifted time brackets would invalidate the subtree
    }
    tree.reparent(id, new_id, edge);
  }
  return {new_id};
}

namespace {

PlannerParams resolve(const Workspace& ws, const PlannerParams& params) {
  PlannerParams p = params;
  if (p.gamma <= 0.0) p.gamma = default_gamma(ws);
  if (!(p.eta > 0.0)) throw std::invalid_argument("plan: eta must be positive");
  if (!(p.goal_bias >= 0.0 && p.goal_bias < 1.0)) {
    throw std::invalid_argument("plan: goal_bias must lie in [0, 1)");
  }
  if (p.max_iterations < 0) throw std::invalid_argument("plan: max_iterations must be >= 0");
  return p;
}

void finish_result(PlanResult& result, const ObstacleField& field, const PlannerParams& params) {
  int best = -1;
  double best_cost = 0.0;
  for (const Node& n : result.tree.nodes()) {
    if (!in_goal(params.goal, n.position)) continue;
    if (best < 0 || n.cost < best_cost) {
      best = n.id;
      best_cost = n.cost;
    }
  }
  if (best < 0) return;

  result.best_path = result.tree.path_from_root(best);
  result.cost = best_cost;
  const auto& path = *result.best_path;
  result.feasibility_certificates.reserve(path.size() > 0 ? path.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const int k = static_cast<int>(i);
    bool ok = point_feasible(field, path[i], k) && point_feasible(field, path[i + 1], k + 1) &&
              edge_feasible(field, k, path[i], path[i + 1]);
    result.feasibility_certificates.push_back(ok);
  }
}

}  // namespace

PlanResult plan(const Workspace& ws, const ObstacleField& field, const Eigen::Vector2d& start,
                const PlannerParams& params) {
  if (!(ws.lower.x() < ws.upper.x() && ws.lower.y() < ws.upper.y())) {
    throw std::invalid_argument("plan: workspace bounds are not ordered");
  }
  const PlannerParams p = resolve(ws, params);
  if (!point_feasible(field, start, 0)) {
    throw InfeasibleStartError("plan: start state violates the chance constraints");
  }

  PlanResult result;
  result.tree = Tree(start);
  result.seed = p.seed;

  if (in_goal(p.goal, start)) {
    result.best_path = std::vector<Eigen::Vector2d>{start};
    result.cost = 0.0;
    return result;
  }

  Rng rng(p.seed);
  for (int i = 0; i < p.max_iterations; ++i) {
    const Eigen::Vector2d q = sample(ws, p.goal, p, rng);
    extend(result.tree, q, field, p);
  }
  result.iterations_used = p.max_iterations;
  finish_result(result, field, p);
  return result;
}

std::vector<PlanResult> plan_multiagent(const std::vector<AgentProblem>& agents,
                                        const Eigen::Matrix2d& agent_covariance) {
  std::vector<PlanResult> results;
  results.reserve(agents.size());

  for (std::size_t j = 0; j < agents.size(); ++j) {
    const AgentProblem& prob = agents[j];
    std::vector<UncertainObstacle> obstacles = prob.obstacles;

    for (std::size_t k = 0; k < j; ++k) {
      const PlanResult& prior = results[k];
      if (prior.best_path && !prior.best_path->empty()) {
        const auto& path = *prior.best_path;
        std::map<int, Eigen::Vector2d> offsets;
        for (std::size_t t = 0; t < path.size(); ++t) {
          offsets[static_cast<int>(t)] = path[t] - path[0];
        }
        obstacles.push_back(
            {Gaussian2d(path[0], agent_covariance), MotionSchedule(std::move(offsets))});
      } else {
        // Failed agent: hold its last known position as a static obstacle.
        obstacles.push_back({Gaussian2d(agents[k].start, agent_covariance), {}});
      }
    }

    const int total = static_cast<int>(obstacles.size());
    const RiskConfig risk = total > 0 ? allocate_risk(prob.delta, total)
                                      : RiskConfig{prob.delta, 0, prob.delta};
    const ObstacleField field(std::move(obstacles), risk);

    try {
      results.push_back(plan(prob.workspace, field, prob.start, prob.params));
    } catch (const InfeasibleStartError&) {
      PlanResult failed;
      failed.tree = Tree(prob.start);
      failed.seed = prob.params.seed;
      results.push_back(std::move(failed));
    }
  }
  return results;
}

}  // namespace ccrrt
