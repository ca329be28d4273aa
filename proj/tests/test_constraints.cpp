#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ccrrt/constraints.hpp"
#include "ccrrt/rng.hpp"
#include "oracles.hpp"

using namespace ccrrt;

namespace {

ObstacleField single_obstacle_field(const Eigen::Vector2d& mu, double alpha,
                                    MotionSchedule schedule = {}) {
  Eigen::Matrix2d sigma;
  sigma << 2.0 / 3.0, 0.0, 0.0, 1.0 / 6.0;
  return ObstacleField({{Gaussian2d(mu, sigma), std::move(schedule)}},
                       risk_from_alpha(alpha, 1));
}

}  // namespace

TEST_CASE("allocate_risk splits the budget evenly") {
  const RiskConfig r = allocate_risk(0.2, 4);
  CHECK(r.alpha == 0.05);
  CHECK(r.delta == 0.2);
  CHECK(r.num_obstacles == 4);
  CHECK(allocate_risk(0.1, 1).alpha == 0.1);
  CHECK(allocate_risk(0.5, 5).alpha == 0.1);

  CHECK_THROWS_AS(allocate_risk(0.0, 3), std::domain_error);
  CHECK_THROWS_AS(allocate_risk(1.0, 3), std::domain_error);
  CHECK_THROWS_AS(allocate_risk(0.2, 0), std::domain_error);
}

TEST_CASE("obstacle field rejects inconsistent risk accounting") {
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Identity();
  std::vector<UncertainObstacle> obs{{Gaussian2d({0, 0}, sigma), {}}};
  CHECK_THROWS_AS(ObstacleField(obs, RiskConfig{0.1, 2, 0.05}), std::invalid_argument);
  CHECK_THROWS_AS(ObstacleField(obs, RiskConfig{0.1, 1, 0.5}), std::invalid_argument);
  CHECK_NOTHROW(ObstacleField(obs, allocate_risk(0.1, 1)));
}

TEST_CASE("point feasibility on the benchmark field") {
  const ObstacleField field = oracles::sec5_field();
  CHECK(point_feasible(field, {0, 0}));  // minimum quadratic is 7.5 > 5.99
  for (const auto& ob : field.obstacles()) {
    CHECK_FALSE(point_feasible(field, ob.gaussian.mean()));
  }
}

TEST_CASE("empty field is vacuously feasible with zero bound") {
  const ObstacleField field({}, RiskConfig{0.2, 0, 0.2});
  CHECK(point_feasible(field, {0, 0}));
  CHECK(segment_feasible(field, {0, 0}, {100, 100}));
  CHECK(collision_prob_bound(field, {0, 0}) == 0.0);
}

TEST_CASE("near-one alpha shrinks the ellipse to a sliver around the mean") {
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Identity();
  std::vector<UncertainObstacle> obs{{Gaussian2d({1, 2}, sigma), {}}};
  const ObstacleField field(obs, RiskConfig{0.999, 1, 0.999});
  CHECK(field.threshold() > 0.0);
  CHECK(field.threshold() < 0.01);
  CHECK_FALSE(point_feasible(field, {1, 2}));     // the mean never passes
  CHECK(point_feasible(field, {1.1, 2}));
}

TEST_CASE("segment feasibility reduces to the point case on degenerate segments") {
  const ObstacleField field = oracles::sec5_field();
  const Eigen::Vector2d good(0, 0), bad(1, 1);
  CHECK(segment_feasible(field, good, good) == point_feasible(field, good));
  CHECK(segment_feasible(field, bad, bad) == point_feasible(field, bad));
}

TEST_CASE("segment through an obstacle mean is infeasible") {
  const ObstacleField field = oracles::sec5_field();
  CHECK_FALSE(segment_feasible(field, {0, 1}, {2, 1}));  // crosses mu_1 = (1,1)
}

TEST_CASE("horizontal segment above an obstacle, fixed by the dense oracle") {
  const ObstacleField field = single_obstacle_field({1, 1}, 0.05);
  const Eigen::Vector2d p(-1, 3), q(3, 3);
  CHECK(point_feasible(field, p));
  CHECK(point_feasible(field, q));
  const double dense =
      oracles::dense_segment_min(field.obstacles()[0].gaussian, {1, 1}, p, q);
  CHECK(dense == doctest::Approx(24.0).epsilon(1e-6));  // closest approach at x = 1
  CHECK(dense > field.threshold());
  CHECK(segment_feasible(field, p, q));
  const double closed =
      segment_min_mahalanobis_sq(field.obstacles()[0].gaussian, {1, 1}, p, q);
  CHECK(std::abs(closed - dense) < 1e-6);
}

TEST_CASE("closed-form segment minimum agrees with dense sampling") {
  Rng rng(314);
  int disagreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector2d mu(rng.uniform(-3, 3), rng.uniform(-3, 3));
    const Gaussian2d g(mu, oracles::random_spd(rng));
    const Eigen::Vector2d p(rng.uniform(-6, 6), rng.uniform(-6, 6));
    const Eigen::Vector2d q(rng.uniform(-6, 6), rng.uniform(-6, 6));
    const double closed = segment_min_mahalanobis_sq(g, mu, p, q);
    const double dense = oracles::dense_segment_min(g, mu, p, q);
    CHECK(closed <= dense + 1e-12);  // dense sampling can only overshoot
    CHECK(dense - closed < 1e-4);
    const double tau = 3.0;
    if ((closed > tau) != (dense > tau)) {
      CHECK(std::abs(dense - tau) < 1e-6);
      ++disagreements;
    }
  }
  CHECK(disagreements <= 2);
}

TEST_CASE("feasibility is monotone in alpha") {
  Rng rng(55);
  const ObstacleField loose = single_obstacle_field({0, 0}, 0.2);
  const ObstacleField tight = single_obstacle_field({0, 0}, 0.05);
  // Larger alpha shrinks the ellipse: anything feasible at 0.05 stays
  // feasible at 0.2.
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector2d x(rng.uniform(-4, 4), rng.uniform(-4, 4));
    if (point_feasible(tight, x)) CHECK(point_feasible(loose, x));
  }
  CHECK(loose.threshold() < tight.threshold());
}

TEST_CASE("segment feasibility implies endpoint feasibility") {
  Rng rng(56);
  const ObstacleField field = oracles::sec5_field();
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector2d p(rng.uniform(-2, 9), rng.uniform(-2, 12));
    const Eigen::Vector2d q(rng.uniform(-2, 9), rng.uniform(-2, 12));
    if (segment_feasible(field, p, q)) {
      CHECK(point_feasible(field, p));
      CHECK(point_feasible(field, q));
    }
  }
}

TEST_CASE("all-zero schedule matches the static evaluation exactly") {
  std::map<int, Eigen::Vector2d> zeros;
  for (int t = 0; t < 5; ++t) zeros[t] = Eigen::Vector2d::Zero();
  const ObstacleField moving = single_obstacle_field({1, 1}, 0.05, MotionSchedule(zeros));
  const ObstacleField still = single_obstacle_field({1, 1}, 0.05);
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector2d x(rng.uniform(-3, 5), rng.uniform(-3, 5));
    const int t = static_cast<int>(rng.uniform(0, 10));
    CHECK(point_feasible(moving, x, t) == point_feasible(still, x, t));
  }
  CHECK(moving.dynamic());
  CHECK_FALSE(still.dynamic());
}

TEST_CASE("schedule lookup is piecewise constant with hold-last semantics") {
  std::map<int, Eigen::Vector2d> offsets;
  offsets[2] = {5.0, 0.0};
  offsets[4] = {10.0, 0.0};
  const MotionSchedule sched(offsets);
  CHECK((sched.offset_at(0).array() == 0.0).all());
  CHECK((sched.offset_at(1).array() == 0.0).all());
  CHECK(sched.offset_at(2).x() == 5.0);
  CHECK(sched.offset_at(3).x() == 5.0);
  CHECK(sched.offset_at(4).x() == 10.0);
  CHECK(sched.offset_at(100).x() == 10.0);

  // The obstacle is only in the way while its offset holds it there.
  const ObstacleField field = single_obstacle_field({1, 1}, 0.05, sched);
  CHECK_FALSE(point_feasible(field, {1, 1}, 0));
  CHECK(point_feasible(field, {1, 1}, 2));       // moved 5 units right
  CHECK_FALSE(point_feasible(field, {6, 1}, 2));
  CHECK(point_feasible(field, {6, 1}, 4));       // moved further
  CHECK_FALSE(point_feasible(field, {11, 1}, 50));
}

TEST_CASE("collision probability bound certificate") {
  const ObstacleField field = oracles::sec5_field();
  CHECK(collision_prob_bound(field, {0, 0}) == 0.2);  // B alpha = 4 * 0.05
  CHECK(collision_prob_bound(field, {1, 1}) == 1.0);
}
