#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ccrrt/constraints.hpp"
#include "ccrrt/dynamics.hpp"
#include "ccrrt/rng.hpp"

namespace ccrrt {

enum class Variant { rrt, rrt_star };
enum class EdgeCostKind { euclidean, unit_step };

struct PlannerParams {
  double eta = 0.6;            // max steer distance
  double gamma = 0.0;          // rewiring-radius constant; <= 0 derives it from the workspace
  int max_iterations = 5000;
  double goal_bias = 0.05;     // probability of sampling the goal center
  GoalRegion goal;
  Variant variant = Variant::rrt_star;
  EdgeCostKind edge_cost = EdgeCostKind::euclidean;
  std::uint64_t seed = 0;
};

/// Sufficient rewiring constant for a free space bounded by the workspace:
/// 2 * sqrt(3 * area / pi).
double default_gamma(const Workspace& ws);

struct Node {
  int id = 0;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  int parent = -1;             // -1 marks the root
  double cost = 0.0;           // cost-to-come
  int depth = 0;               // time step; root is 0
  double edge_cost_in = 0.0;   // cost of the edge from parent (0 at the root)
};

/// Rooted tree over parent links. Mutators keep cost, depth and the child
/// index consistent; reparenting propagates both through the whole subtree.
class Tree {
 public:
  Tree() = default;
  explicit Tree(const Eigen::Vector2d& root);

  bool empty() const { return nodes_.empty(); }
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(int id) const { return nodes_.at(id); }
  const std::vector<int>& children(int id) const { return children_.at(id); }

  int add_node(const Eigen::Vector2d& position, int parent, double edge_cost);
  void reparent(int id, int new_parent, double edge_cost);

  /// Ids of the subtree rooted at id, DFS preorder (id first).
  std::vector<int> subtree(int id) const;

  std::vector<Eigen::Vector2d> path_from_root(int id) const;

  /// Root-path cost recomputed from edge costs, for consistency checks.
  double recompute_cost(int id) const;

 private:
  void propagate(int id);

  std::vector<Node> nodes_;
  std::vector<std::vector<int>> children_;
};

struct PlanResult {
  Tree tree;
  std::optional<std::vector<Eigen::Vector2d>> best_path;
  std::optional<double> cost;
  int iterations_used = 0;
  std::uint64_t seed = 0;
  std::vector<bool> feasibility_certificates;  // one per best-path edge
};

/// Planning rejected because the start violates the chance constraints.
struct InfeasibleStartError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Goal-biased uniform sampling over the workspace box. One uniform draw
/// decides the bias branch; a goal sample consumes no further draws.
Eigen::Vector2d sample(const Workspace& ws, const GoalRegion& goal,
                       const PlannerParams& params, Rng& rng);

/// Index of the node closest to q in Euclidean distance, smallest id on ties.
int nearest(const Tree& tree, const Eigen::Vector2d& q);

/// q if within eta of from, otherwise the point at distance eta toward q.
Eigen::Vector2d steer(const Eigen::Vector2d& from, const Eigen::Vector2d& to, double eta);

/// Neighborhood radius min(gamma * sqrt(log n / n), eta); eta when n <= 1.
double near_radius(int n, double gamma, double eta);

/// Ids of all nodes within near_radius of q_new, ascending.
std::vector<int> near(const Tree& tree, const Eigen::Vector2d& q_new, int n,
                      const PlannerParams& params);

double edge_cost(EdgeCostKind kind, const Eigen::Vector2d& a, const Eigen::Vector2d& b);

struct ExtendResult {
  std::optional<int> node_id;  // empty on trapped
  bool added() const { return node_id.has_value(); }
};

/// One tree-expansion step toward sample q. Steers from the nearest node,
/// rejects edges that cross a risk ellipse, picks the cheapest feasible
/// parent in the neighborhood and rewires neighbors through the new node
/// when that lowers their cost (variant rrt keeps the nearest parent and
/// skips rewiring). A segment at depth k is checked against obstacle
/// positions at steps k and k+1.
ExtendResult extend(Tree& tree, const Eigen::Vector2d& q, const ObstacleField& field,
                    const PlannerParams& params);

/// Full planning run: max_iterations sample/extend steps, then the cheapest
/// path into the goal region, re-verified edge by edge. Deterministic in
/// (workspace, field, start, params).
PlanResult plan(const Workspace& ws, const ObstacleField& field, const Eigen::Vector2d& start,
                const PlannerParams& params);

/// One agent's planning problem, used by the prioritized multi-agent mode.
struct AgentProblem {
  Workspace workspace;
  std::vector<UncertainObstacle> obstacles;
  double delta = 0.0;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  PlannerParams params;
};

/// Prioritized sequential planning: agents plan in order, each treating the
/// paths of the already-planned agents as dynamic Gaussian obstacles with
/// covariance agent_covariance (held at the final position after arrival;
/// a failed agent contributes its start as a static obstacle). The risk
/// budget is re-allocated over own obstacles plus prior agents.
std::vector<PlanResult> plan_multiagent(const std::vector<AgentProblem>& agents,
                                        const Eigen::Matrix2d& agent_covariance);

}  // namespace ccrrt
