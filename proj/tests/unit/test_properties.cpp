// Copyright 2026 The contingency-games Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Randomized properties checked over many seeded draws.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cgames/game/kkt.hpp"
#include "cgames/mcp/lcp_enumeration.hpp"
#include "cgames/mcp/problem.hpp"
#include "cgames/mcp/solver.hpp"
#include "cgames/scenarios/builders.hpp"
#include "cgames/scenarios/collision.hpp"
#include "cgames/scenarios/config.hpp"

namespace mcp = cgames::mcp;
namespace sc = cgames::scenarios;
namespace game = cgames::game;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RandomLcp {
  Eigen::MatrixXd M;
  Eigen::VectorXd q, lower, upper;
};

// Positive definite M, so the box LCP has exactly one solution.
RandomLcp random_lcp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 8);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> kind(0, 3);
  const int d = dim(rng);
  Eigen::MatrixXd A(d, d);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = n(rng);
  RandomLcp p;
  p.M = A.transpose() * A + 0.1 * Eigen::MatrixXd::Identity(d, d);
  p.q.resize(d);
  p.lower.resize(d);
  p.upper.resize(d);
  for (int i = 0; i < d; ++i) {
    p.q[i] = 2.0 * n(rng);
    switch (kind(rng)) {
      case 0: p.lower[i] = 0.0, p.upper[i] = kInf; break;
      case 1: p.lower[i] = -kInf, p.upper[i] = kInf; break;
      case 2: p.lower[i] = -kInf, p.upper[i] = 0.5; break;
      default: p.lower[i] = -1.0 + 0.2 * n(rng), p.upper[i] = p.lower[i] + 0.5 + std::abs(n(rng)); break;
    }
  }
  return p;
}

}  // namespace

TEST(LcpProperty, SolverMatchesEnumerationOracle) {
  std::mt19937_64 rng(20261016);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_lcp(rng);
    const auto oracle = mcp::solve_lcp_bruteforce(p.M, p.q, p.lower, p.upper);
    ASSERT_EQ(oracle.size(), 1u) << "trial " << trial;
    const auto problem = mcp::make_affine_mcp(p.M, p.q, p.lower, p.upper);
    const auto r = mcp::solve_mcp(problem, Eigen::VectorXd::Zero(p.q.size()));
    ASSERT_TRUE(r.converged()) << "trial " << trial;
    EXPECT_LE((r.solution - oracle[0]).cwiseAbs().maxCoeff(), 1e-7) << "trial " << trial;
    EXPECT_TRUE(mcp::check_mcp_solution(problem, r.solution, 1e-7).satisfied);
  }
}

TEST(LcpProperty, ResidualsVanishAtTheOracleSolution) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_lcp(rng);
    const Eigen::VectorXd v = mcp::solve_lcp_bruteforce(p.M, p.q, p.lower, p.upper).at(0);
    const Eigen::VectorXd g = p.M * v + p.q;
    EXPECT_LE(mcp::fb_residual(p.lower, p.upper, v, g).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(mcp::natural_residual(p.lower, p.upper, v, g).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(LcpProperty, MeritHistoryNeverIncreases) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(0.0, 3.0);
  mcp::SolverOptions o;
  o.record_history = true;
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_lcp(rng);
    Eigen::VectorXd v0(p.q.size());
    for (Eigen::Index i = 0; i < v0.size(); ++i) v0[i] = n(rng);
    const auto r = mcp::solve_mcp(mcp::make_affine_mcp(p.M, p.q, p.lower, p.upper), v0, o);
    ASSERT_TRUE(r.converged());
    for (std::size_t k = 1; k < r.merit_history.size(); ++k) {
      EXPECT_LE(r.merit_history[k], r.merit_history[k - 1] * (1.0 + 1e-12)) << "trial " << trial;
    }
  }
}

TEST(FischerBurmeisterProperty, SignAndHomogeneity) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 2.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = n(rng), b = n(rng), t = scale(rng);
    const double phi = mcp::fischer_burmeister(a, b);
    if (a > 0.0 && b > 0.0) EXPECT_GT(phi, 0.0);
    if (a < 0.0 || b < 0.0) EXPECT_LT(phi, 0.0);
    EXPECT_NEAR(mcp::fischer_burmeister(t * a, t * b), t * phi, 1e-12 * (1.0 + std::abs(t * phi)));
    EXPECT_NEAR(mcp::fischer_burmeister(b, a), phi, 1e-14);
    EXPECT_DOUBLE_EQ(mcp::fischer_burmeister(std::abs(a), 0.0), 0.0);
  }
}

TEST(LseProperty, BoundsAndMonotoneInSharpness) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 5.0);
  std::uniform_int_distribution<int> size(1, 6);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(size(rng)));
    for (auto& x : v) x = n(rng);
    const double max = *std::max_element(v.begin(), v.end());
    double previous = kInf;
    for (double alpha : {0.5, 2.0, 20.0, 100.0}) {
      const double s = sc::lse_smooth_max(v, alpha);
      EXPECT_GE(s, max - 1e-12);
      EXPECT_LE(s, max + std::log(static_cast<double>(v.size())) / alpha + 1e-12);
      EXPECT_LE(s, previous + 1e-12);
      previous = s;
    }
  }
}

TEST(CollisionProperty, FarLongitudinalSeparationIsSafe) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> lateral(-5.0, 5.0), gap(3.5, 40.0);
  for (int side : {1, -1}) {
    const auto g = sc::CollisionGeometry::box(3.0, 2.0, side);
    for (int trial = 0; trial < 200; ++trial) {
      const double d2 = lateral(rng);
      EXPECT_GT(sc::collision_constraint(Eigen::Vector2d(gap(rng), d2), g, 20.0), 0.0);
      EXPECT_GT(sc::collision_constraint(Eigen::Vector2d(-gap(rng), d2), g, 20.0), 0.0);
    }
  }
}

TEST(ConfigProperty, RandomEditsSurviveJsonRoundTrip) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> w(0.0, 5.0), pos(-3.0, 30.0);
  std::uniform_int_distribution<int> horizon(5, 40);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = sc::default_config(trial % 2 == 0 ? sc::ScenarioId::kJaywalking : sc::ScenarioId::kOvertaking);
    c.horizon = horizon(rng);
    c.branching_time = c.horizon / 2;
    c.grid.branching_times = {0, c.horizon};
    c.car_weights.lane = w(rng);
    c.pedestrian_weights.goal = w(rng);
    c.belief = {0.3, 0.7};
    c.ego.initial_state[0] = pos(rng);
    c.grid.p1_min = pos(rng);
    const auto again = sc::parse_config(sc::config_to_json(c));
    EXPECT_EQ(sc::config_hash(again), sc::config_hash(c));
    EXPECT_EQ(again.car_weights.lane, c.car_weights.lane);
    EXPECT_EQ(again.ego.initial_state, c.ego.initial_state);
  }
}

TEST(KktProperty, PackUnpackIsTheIdentity) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto id : {sc::ScenarioId::kJaywalking, sc::ScenarioId::kOvertaking}) {
    const auto g = sc::build_game(sc::default_config(id));
    for (auto plan : {game::EgoPlan::kPerHypothesis, game::EgoPlan::kShared}) {
      const auto system = game::build_kkt_mcp(g, plan);
      Eigen::VectorXd v(system.dimension());
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = n(rng);
      const Eigen::VectorXd again = system.pack(system.unpack_profile(v), system.unpack_multipliers(v));
      EXPECT_EQ((again - v).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}
