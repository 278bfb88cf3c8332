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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cgames/mcp/lcp_enumeration.hpp"
#include "cgames/mcp/problem.hpp"
#include "cgames/mcp/solver.hpp"

namespace mcp = cgames::mcp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// Fixed 5-dimensional box LCP with mixed bound types.
struct FrozenLcp {
  Eigen::MatrixXd M;
  Eigen::VectorXd q, lower, upper;
  FrozenLcp() {
    Eigen::MatrixXd A(5, 5);
    A << 1.0, 0.2, -0.5, 0.3, 0.0,  //
        -0.4, 1.1, 0.6, 0.0, 0.2,   //
        0.3, -0.2, 0.9, 0.5, -0.1,  //
        0.0, 0.4, -0.3, 1.2, 0.7,   //
        0.5, 0.0, 0.1, -0.6, 0.8;
    M = A.transpose() * A + 0.1 * Eigen::MatrixXd::Identity(5, 5);
    q = vec({-1.0, 0.5, -0.2, 0.8, -1.5});
    lower = vec({0.0, 0.0, -kInf, -1.0, 0.0});
    upper = vec({kInf, 1.0, kInf, 1.0, 0.5});
  }
};

}  // namespace

TEST(FischerBurmeister, ZeroExactlyOnComplementarity) {
  EXPECT_DOUBLE_EQ(mcp::fischer_burmeister(0.0, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(mcp::fischer_burmeister(2.0, 0.0), 0.0);
  EXPECT_GT(std::abs(mcp::fischer_burmeister(1.0, 1.0)), 0.5);
  EXPECT_LT(mcp::fischer_burmeister(-1.0, 2.0), 0.0);
}

TEST(FbResidual, BoundKinds) {
  const Eigen::VectorXd lo = vec({-kInf, 0.0, -kInf, 0.0});
  const Eigen::VectorXd up = vec({kInf, kInf, 1.0, 1.0});
  const Eigen::VectorXd v = vec({0.3, 0.0, 1.0, 0.5});
  const Eigen::VectorXd g = vec({0.0, 2.0, -3.0, 0.0});
  const Eigen::VectorXd phi = mcp::fb_residual(lo, up, v, g);
  EXPECT_LT(phi.cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::VectorXd nat = mcp::natural_residual(lo, up, v, g);
  EXPECT_LT(nat.cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::VectorXd bad = mcp::fb_residual(lo, up, v, vec({1.0, 2.0, 3.0, 1.0}));
  EXPECT_NEAR(bad[0], 1.0, 1e-15);
  EXPECT_GT(std::abs(bad[2]), 1e-3);
  EXPECT_GT(std::abs(bad[3]), 1e-3);
}

TEST(Problem, RejectsInvalidBounds) {
  auto g = [](const Eigen::VectorXd& v, Eigen::VectorXd& out) { out = v; };
  auto j = [](const Eigen::VectorXd& v, mcp::SparseMatrix& out) {
    out.resize(v.size(), v.size());
    out.setIdentity();
  };
  EXPECT_THROW(mcp::MixedComplementarityProblem(vec({1.0}), vec({1.0}), g, j), std::invalid_argument);
  EXPECT_THROW(mcp::MixedComplementarityProblem(vec({0.0}), vec({1.0, 2.0}), g, j), std::invalid_argument);
  EXPECT_THROW(mcp::MixedComplementarityProblem(vec({0.0}), vec({1.0}), nullptr, j), std::invalid_argument);
  EXPECT_THROW(mcp::MixedComplementarityProblem(vec({0.0}), vec({1.0}), g, j, {{"x", 0, 2}}), std::invalid_argument);
  const mcp::MixedComplementarityProblem ok(vec({0.0, -kInf}), vec({1.0, kInf}), g, j, {{"x", 0, 2}});
  EXPECT_EQ(ok.dimension(), 2);
  EXPECT_EQ(ok.clip(vec({3.0, -5.0})), vec({1.0, -5.0}));
}

TEST(CheckSolution, ClassifiesClauses) {
  const auto p = mcp::make_affine_mcp(Eigen::MatrixXd::Identity(3, 3), vec({1.0, -0.5, -2.0}), vec({0.0, 0.0, 0.0}),
                                      vec({kInf, kInf, 1.0}));
  const auto check = mcp::check_mcp_solution(p, vec({0.0, 0.5, 1.0}), 1e-12);
  EXPECT_TRUE(check.satisfied);
  EXPECT_EQ(check.components[0].clause, mcp::Clause::kAtLower);
  EXPECT_EQ(check.components[1].clause, mcp::Clause::kInterior);
  EXPECT_EQ(check.components[2].clause, mcp::Clause::kAtUpper);
  const auto wrong = mcp::check_mcp_solution(p, vec({0.2, 0.5, 1.0}), 1e-12);
  EXPECT_FALSE(wrong.satisfied);
  EXPECT_EQ(wrong.worst_index, 0);
  EXPECT_STREQ(mcp::to_string(wrong.components[0].clause), "violated");
}

TEST(BruteForce, HandComputedLcp) {
  Eigen::MatrixXd M(2, 2);
  M << 2.0, 1.0, 1.0, 2.0;
  const auto sols = mcp::solve_lcp_bruteforce(M, vec({-1.0, 1.0}), vec({0.0, 0.0}), vec({kInf, kInf}));
  ASSERT_EQ(sols.size(), 1U);
  EXPECT_NEAR(sols[0][0], 0.5, 1e-15);
  EXPECT_NEAR(sols[0][1], 0.0, 1e-15);
}

TEST(BruteForce, RejectsLargeDimension) {
  const int d = mcp::kMaxEnumerationDimension + 1;
  EXPECT_THROW(mcp::solve_lcp_bruteforce(Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d),
                                         Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)),
               std::invalid_argument);
}

TEST(BruteForce, FrozenOracleValue) {
  const FrozenLcp lcp;
  const auto sols = mcp::solve_lcp_bruteforce(lcp.M, lcp.q, lcp.lower, lcp.upper);
  ASSERT_EQ(sols.size(), 1U);
  const Eigen::VectorXd expected = vec({0.65310661885962995, 0.0, 0.28997531758622913, -0.45453971192794512, 0.5});
  EXPECT_LT((sols[0] - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Solver, MatchesFrozenOracleValue) {
  const FrozenLcp lcp;
  const auto p = mcp::make_affine_mcp(lcp.M, lcp.q, lcp.lower, lcp.upper);
  const auto r = mcp::solve_mcp(p, Eigen::VectorXd::Zero(5));
  ASSERT_TRUE(r.converged()) << mcp::to_string(r.status);
  const Eigen::VectorXd expected = vec({0.65310661885962995, 0.0, 0.28997531758622913, -0.45453971192794512, 0.5});
  EXPECT_LT((r.solution - expected).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE(r.merit_norm, 1e-8);
  EXPECT_TRUE(mcp::check_mcp_solution(p, r.solution, 1e-7).satisfied);
}

TEST(Solver, NonlinearProblemWithFreeAndBoundedComponents) {
  // G(v) = (exp(v0) - 2 + v1, v1 - 0.5 * v0); v0 free, v1 >= 0.
  auto g = [](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    out.resize(2);
    out[0] = std::exp(v[0]) - 2.0 + v[1];
    out[1] = v[1] - 0.5 * v[0];
  };
  auto j = [](const Eigen::VectorXd& v, mcp::SparseMatrix& out) {
    Eigen::MatrixXd d(2, 2);
    d << std::exp(v[0]), 1.0, -0.5, 1.0;
    out = d.sparseView(0.0, 0.0);
  };
  const mcp::MixedComplementarityProblem p(vec({-kInf, 0.0}), vec({kInf, kInf}), g, j);
  const auto r = mcp::solve_mcp(p, vec({0.0, 0.0}));
  ASSERT_TRUE(r.converged());
  // Solution: v1 = v0 / 2 > 0 with exp(v0) + v0 / 2 = 2.
  EXPECT_NEAR(std::exp(r.solution[0]) + 0.5 * r.solution[0], 2.0, 1e-9);
  EXPECT_NEAR(r.solution[1], 0.5 * r.solution[0], 1e-9);
}

TEST(Solver, RecordsMonotoneMeritHistory) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd A(6, 6);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = n(rng);
  Eigen::VectorXd q(6);
  for (Eigen::Index i = 0; i < 6; ++i) q[i] = n(rng);
  const auto p = mcp::make_affine_mcp(A.transpose() * A + 0.1 * Eigen::MatrixXd::Identity(6, 6), q,
                                      Eigen::VectorXd::Zero(6), Eigen::VectorXd::Constant(6, kInf));
  mcp::SolverOptions o;
  o.record_history = true;
  const auto r = mcp::solve_mcp(p, Eigen::VectorXd::Constant(6, 5.0), o);
  ASSERT_TRUE(r.converged());
  ASSERT_GE(r.merit_history.size(), 2U);
  for (std::size_t k = 1; k < r.merit_history.size(); ++k) EXPECT_LE(r.merit_history[k], r.merit_history[k - 1]);
}

TEST(Solver, ClipsStartAndValidatesInputs) {
  const auto p = mcp::make_affine_mcp(Eigen::MatrixXd::Identity(2, 2), vec({-1.0, 1.0}), vec({0.0, 0.0}),
                                      vec({kInf, kInf}));
  EXPECT_THROW(mcp::solve_mcp(p, vec({1.0})), std::invalid_argument);
  mcp::SolverOptions bad;
  bad.line_search_contraction = 1.0;
  EXPECT_THROW(mcp::solve_mcp(p, vec({1.0, 1.0}), bad), std::invalid_argument);
  bad = {};
  bad.max_iterations = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  const auto r = mcp::solve_mcp(p, vec({-10.0, -10.0}));
  ASSERT_TRUE(r.converged());
  EXPECT_NEAR(r.solution[0], 1.0, 1e-10);
  EXPECT_NEAR(r.solution[1], 0.0, 1e-10);
}

TEST(Solver, ReportsFailureOnInfeasibleProblem) {
  // G(v) = -1 with v >= 0 has no solution.
  auto g = [](const Eigen::VectorXd&, Eigen::VectorXd& out) { out = Eigen::VectorXd::Constant(1, -1.0); };
  auto j = [](const Eigen::VectorXd&, mcp::SparseMatrix& out) {
    out.resize(1, 1);
    out.insert(0, 0) = 0.0;
  };
  const mcp::MixedComplementarityProblem p(vec({0.0}), vec({kInf}), g, j);
  mcp::SolverOptions o;
  o.max_iterations = 50;
  const auto r = mcp::solve_mcp(p, vec({0.0}), o);
  EXPECT_FALSE(r.converged());
  EXPECT_GT(r.merit_norm, 1e-3);
  EXPECT_GE(r.wall_time, 0.0);
}

TEST(SolutionReport, ContainsBlocksAndResiduals) {
  auto g = [](const Eigen::VectorXd& v, Eigen::VectorXd& out) { out = v - vec({1.0, 2.0}); };
  auto j = [](const Eigen::VectorXd&, mcp::SparseMatrix& out) {
    out.resize(2, 2);
    out.setIdentity();
  };
  const mcp::MixedComplementarityProblem p(vec({-kInf, -kInf}), vec({kInf, kInf}), g, j, {{"a", 0, 1}, {"b", 1, 2}});
  std::ostringstream os;
  mcp::write_solution_report(os, p, vec({1.0, 0.0}));
  const auto doc = nlohmann::json::parse(os.str());
  EXPECT_EQ(doc["dimension"], 2);
  EXPECT_EQ(doc["blocks"].size(), 2U);
  EXPECT_DOUBLE_EQ(doc["blocks"][0]["natural_residual_norm"].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(doc["blocks"][1]["natural_residual_norm"].get<double>(), 2.0);
}
