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
#include <span>
#include <vector>

#include "cgames/autodiff/derivatives.hpp"
#include "cgames/autodiff/dual.hpp"
#include "cgames/autodiff/local_function.hpp"
#include "cgames/autodiff/tracer.hpp"

namespace ad = cgames::autodiff;

namespace {

struct Rosenbrock {
  template <typename S>
  S operator()(std::span<const S> x) const {
    S total(0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      total = total + 100.0 * ad::square(x[i + 1] - x[i] * x[i]) + ad::square(1.0 - x[i]);
    }
    return total;
  }
};

struct Mixed {
  template <typename S>
  std::vector<S> operator()(std::span<const S> x) const {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    return {sin(x[0]) * x[1], exp(x[1] / x[2]), log(x[0] * x[0] + 1.0) + sqrt(x[2]), cos(x[3]) - 2.0 / x[0]};
  }
};

Eigen::MatrixXd fd_jacobian(const Eigen::VectorXd& x) {
  Mixed f;
  const double h = 1e-6;
  Eigen::MatrixXd jac(4, x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    std::vector<double> xp(x.data(), x.data() + x.size()), xm = xp;
    xp[static_cast<std::size_t>(j)] += h;
    xm[static_cast<std::size_t>(j)] -= h;
    const auto fp = f(std::span<const double>(xp));
    const auto fm = f(std::span<const double>(xm));
    for (int i = 0; i < 4; ++i) jac(i, j) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2 * h);
  }
  return jac;
}

}  // namespace

TEST(Dual, ArithmeticAndChainRule) {
  using D = ad::Dual<double, 2>;
  D x(3.0, {1.0, 0.0});
  D y(2.0, {0.0, 1.0});
  const D z = x * y + x / y - 4.0 * y;
  EXPECT_DOUBLE_EQ(z.value, 6.0 + 1.5 - 8.0);
  EXPECT_DOUBLE_EQ(z.partials[0], 2.0 + 0.5);
  EXPECT_DOUBLE_EQ(z.partials[1], 3.0 - 0.75 - 4.0);

  const D e = ad::exp(x) * ad::sin(y);
  EXPECT_NEAR(e.partials[0], std::exp(3.0) * std::sin(2.0), 1e-12);
  EXPECT_NEAR(e.partials[1], std::exp(3.0) * std::cos(2.0), 1e-12);
}

TEST(Dual, DomainErrors) {
  using D = ad::Dual<double, 1>;
  EXPECT_THROW(ad::log(D(0.0)), ad::DomainError);
  EXPECT_THROW(ad::sqrt(D(-1.0)), ad::DomainError);
  EXPECT_NO_THROW(ad::sqrt(D(1e-300)));
}

TEST(Dual, PrimalOfNestedDual) {
  ad::Dual<ad::Dual<double, 2>, 2> x;
  x.value.value = 4.5;
  EXPECT_DOUBLE_EQ(ad::primal(x), 4.5);
}

TEST(Gradient, RosenbrockClosedForm) {
  Eigen::VectorXd x(3);
  x << -1.2, 1.0, 0.7;
  const Eigen::VectorXd g = ad::gradient<2>(Rosenbrock{}, x);
  Eigen::VectorXd expected(3);
  expected[0] = -400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]);
  expected[1] = 200.0 * (x[1] - x[0] * x[0]) - 400.0 * x[1] * (x[2] - x[1] * x[1]) - 2.0 * (1.0 - x[1]);
  expected[2] = 200.0 * (x[2] - x[1] * x[1]);
  EXPECT_LT((g - expected).norm(), 1e-10);
  EXPECT_DOUBLE_EQ(ad::value(Rosenbrock{}, x), Rosenbrock{}(std::span<const double>(std::vector<double>{-1.2, 1.0, 0.7})));
}

TEST(Hessian, RosenbrockSymmetricAndExact) {
  Eigen::VectorXd x(2);
  x << 0.3, -0.4;
  const Eigen::MatrixXd h = ad::hessian<1>(Rosenbrock{}, x);
  EXPECT_NEAR(h(0, 0), 1200.0 * x[0] * x[0] - 400.0 * x[1] + 2.0, 1e-9);
  EXPECT_NEAR(h(0, 1), -400.0 * x[0], 1e-9);
  EXPECT_NEAR(h(1, 0), -400.0 * x[0], 1e-9);
  EXPECT_NEAR(h(1, 1), 200.0, 1e-9);
}

TEST(Jacobian, DenseMatchesFiniteDifferencesForEveryChunkWidth) {
  Eigen::VectorXd x(4);
  x << 0.7, -0.3, 1.9, 2.2;
  const Eigen::MatrixXd ref = fd_jacobian(x);
  EXPECT_LT((ad::jacobian_dense<1>(Mixed{}, x) - ref).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT((ad::jacobian_dense<3>(Mixed{}, x) - ref).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT((ad::jacobian_dense<8>(Mixed{}, x) - ref).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Jacobian, SparsePatternIsStructural) {
  Eigen::VectorXd x(4);
  x << 0.0, 0.0, 1.0, 0.0;  // sin(0) * x1 has a numerically zero partial in x1
  const auto pattern = ad::jacobian_pattern(Mixed{}, 4);
  ASSERT_EQ(pattern.size(), 4U);
  EXPECT_EQ(pattern[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(pattern[1], (std::vector<int>{1, 2}));
  EXPECT_EQ(pattern[2], (std::vector<int>{0, 2}));
  EXPECT_EQ(pattern[3], (std::vector<int>{0, 3}));
  x[0] = 0.5;
  const auto jac = ad::jacobian(Mixed{}, x);
  EXPECT_EQ(jac.nonZeros(), 8);
}

TEST(Tracer, DependencySetsUnion) {
  auto a = ad::DependencyTracer::variable(3);
  auto b = ad::DependencyTracer::variable(70);
  const auto c = a * 2.0 + ad::exp(b);
  EXPECT_TRUE(c.depends_on(3));
  EXPECT_TRUE(c.depends_on(70));
  EXPECT_FALSE(c.depends_on(4));
  EXPECT_EQ(c.indices(), (std::vector<int>{3, 70}));
}

TEST(Tracer, CurvatureOnlyForNonlinearPairs) {
  auto x = ad::CurvatureTracer::variable(0);
  auto y = ad::CurvatureTracer::variable(1);
  auto z = ad::CurvatureTracer::variable(2);
  const auto f = x * y + 3.0 * z;
  EXPECT_EQ(f.gradient_mask(), 0b111U);
  EXPECT_EQ(f.hessian_row(0), 0b010U);
  EXPECT_EQ(f.hessian_row(1), 0b001U);
  EXPECT_EQ(f.hessian_row(2), 0U);
  const auto g = ad::sin(z);
  EXPECT_EQ(g.hessian_row(2), 0b100U);
}

TEST(LocalFunction, JacobianAndWeightedHessian) {
  auto fn = ad::make_local_function<2>(3, 2, "test", [](auto x, auto out) {
    out[0] = x[0] * x[1] * x[2];
    out[1] = x[0] * x[0] + 2.0 * x[2];
  });
  EXPECT_EQ(fn->input_dim(), 3);
  EXPECT_EQ(fn->output_dim(), 2);
  EXPECT_EQ(fn->name(), "test");
  const std::vector<double> x{1.0, 2.0, 3.0};
  std::vector<double> out(2);
  Eigen::MatrixXd jac(2, 3);
  fn->evaluate_jacobian(x, out, jac);
  EXPECT_DOUBLE_EQ(out[0], 6.0);
  EXPECT_DOUBLE_EQ(out[1], 7.0);
  Eigen::MatrixXd expected_jac(2, 3);
  expected_jac << 6.0, 3.0, 2.0, 2.0, 0.0, 2.0;
  EXPECT_LT((jac - expected_jac).norm(), 1e-14);

  const std::vector<double> w{0.5, 2.0};
  Eigen::MatrixXd hess(3, 3);
  fn->weighted_hessian(x, w, hess);
  Eigen::MatrixXd expected_hess(3, 3);
  expected_hess << 4.0, 1.5, 1.0, 1.5, 0.0, 0.5, 1.0, 0.5, 0.0;
  EXPECT_LT((hess - expected_hess).norm(), 1e-14);

  EXPECT_EQ(fn->pattern().jacobian_rows[1], 0b101U);
  EXPECT_EQ(fn->pattern().curved_inputs, 0b111U);
}

TEST(LocalFunction, RejectsBadDimensions) {
  auto fn = ad::make_local_function(2, 1, "f", [](auto x, auto out) { out[0] = x[0] + x[1]; });
  std::vector<double> x{1.0}, out(1);
  EXPECT_THROW(fn->evaluate(x, out), std::invalid_argument);
  auto make_empty = [] { return ad::make_local_function(0, 1, "g", [](auto, auto out) { out[0] = 0.0; }); };
  EXPECT_THROW(make_empty(), std::invalid_argument);
}
