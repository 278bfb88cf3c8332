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
#include <numbers>
#include <vector>

#include "cgames/dynamics/dynamics.hpp"

namespace dyn = cgames::dynamics;

TEST(PointMass, ExactDoubleIntegrator) {
  dyn::PointMassParams p;
  p.dt = 0.5;
  const Eigen::Vector4d x(1.0, 2.0, 0.5, -1.0);
  const Eigen::Vector2d u(2.0, 0.4);
  const Eigen::Vector4d next = dyn::point_mass_step(x, u, p);
  EXPECT_DOUBLE_EQ(next[0], 1.0 + 0.25 + 0.125 * 2.0);
  EXPECT_DOUBLE_EQ(next[1], 2.0 - 0.5 + 0.125 * 0.4);
  EXPECT_DOUBLE_EQ(next[2], 1.5);
  EXPECT_DOUBLE_EQ(next[3], -0.8);
}

TEST(Unicycle, StraightLineAndQuarterTurn) {
  dyn::UnicycleParams p;
  p.dt = 0.2;
  const Eigen::Vector4d x(0.0, 0.0, 10.0, 0.0);
  const Eigen::Vector4d straight = dyn::unicycle_step(x, Eigen::Vector2d(1.0, 0.0), p);
  EXPECT_DOUBLE_EQ(straight[0], 0.2 * 10.2);
  EXPECT_DOUBLE_EQ(straight[1], 0.0);
  EXPECT_DOUBLE_EQ(straight[2], 10.2);

  const double omega = std::numbers::pi / 2.0 / p.dt;
  const Eigen::Vector4d turned = dyn::unicycle_step(x, Eigen::Vector2d(0.0, omega), p);
  EXPECT_NEAR(turned[0], 0.0, 1e-12);
  EXPECT_NEAR(turned[1], 2.0, 1e-12);
  EXPECT_NEAR(turned[3], std::numbers::pi / 2.0, 1e-12);
}

TEST(Params, Validation) {
  dyn::PointMassParams pm;
  pm.dt = 0.0;
  EXPECT_THROW(pm.validate(), std::invalid_argument);
  dyn::UnicycleParams uc;
  uc.omega_min = 2.0;
  EXPECT_THROW(uc.validate(), std::invalid_argument);
  EXPECT_THROW(dyn::make_unicycle_dynamics(uc), std::invalid_argument);
}

TEST(BoundConstraints, OnlyFiniteBoundsAreStacked) {
  dyn::UnicycleParams p;
  Eigen::MatrixXd states(4, 2);
  states << 0.0, 1.0,  //
      0.0, 0.0,        //
      5.0, 13.0,       //
      0.0, 0.0;
  Eigen::MatrixXd controls(2, 2);
  controls << 1.0, -5.0,  //
      0.0, 0.5;
  const Eigen::VectorXd g = dyn::bound_constraints(p, states, controls);
  // Speed gives two rows per step; each control gives two rows per step.
  ASSERT_EQ(g.size(), 2 * 2 + 4 * 2);
  EXPECT_DOUBLE_EQ(g[0], 5.0);          // v - v_min at t = 1
  EXPECT_DOUBLE_EQ(g[1], 7.0);          // v_max - v
  EXPECT_DOUBLE_EQ(g[3], -1.0);         // v_max - v at t = 2 is violated
  EXPECT_DOUBLE_EQ(g[8], -5.0 + 4.0);   // a - a_min at t = 2
  EXPECT_THROW(dyn::bound_constraints(p, states.topRows(3), controls), std::invalid_argument);
}

TEST(DynamicsLocalFunction, JacobianMatchesFiniteDifferences) {
  dyn::UnicycleParams p;
  const auto fn = dyn::make_unicycle_dynamics(p);
  const std::vector<double> x{1.0, -0.5, 7.0, 0.3, 0.8, -0.2};
  std::vector<double> out(4);
  Eigen::MatrixXd jac(4, 6);
  fn->evaluate_jacobian(x, out, jac);
  const double h = 1e-6;
  for (int j = 0; j < 6; ++j) {
    auto xp = x, xm = x;
    xp[static_cast<std::size_t>(j)] += h;
    xm[static_cast<std::size_t>(j)] -= h;
    std::vector<double> fp(4), fm(4);
    fn->evaluate(xp, fp);
    fn->evaluate(xm, fm);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(jac(i, j), (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2 * h), 1e-7);
    }
  }
  // Position does not feed back into anything but itself.
  EXPECT_EQ(fn->pattern().jacobian_rows[2], (1U << 2) | (1U << 4));
}

TEST(DynamicsLocalFunction, PointMassIsLinear) {
  const auto fn = dyn::make_point_mass_dynamics(dyn::PointMassParams{});
  EXPECT_EQ(fn->pattern().curved_inputs, 0U);
}
