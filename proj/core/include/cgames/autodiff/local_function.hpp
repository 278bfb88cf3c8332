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

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cgames/autodiff/derivatives.hpp"

namespace cgames::autodiff {

/// Structural derivative pattern of a local function (at most 64 inputs).
struct LocalPattern {
  std::vector<std::uint64_t> jacobian_rows;  // per output: mask of touched inputs
  std::vector<std::uint64_t> hessian_rows;   // per input: union over outputs of curvature mask
  std::uint64_t curved_inputs = 0;           // inputs with any nonzero Hessian row
};

/// Type-erased smooth vector function of a small number of inputs.
///
/// This is the unit from which games are assembled: stage costs, dynamics
/// residuals and constraints are all local functions of a few stage
/// variables. Derivatives come from forward-mode duals; the structural
/// pattern is traced once at construction.
class LocalFunction {
 public:
  LocalFunction(int input_dim, int output_dim, std::string name)
      : input_dim_(input_dim), output_dim_(output_dim), name_(std::move(name)) {}
  virtual ~LocalFunction() = default;

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  const std::string& name() const { return name_; }
  const LocalPattern& pattern() const { return pattern_; }

  virtual void evaluate(std::span<const double> x, std::span<double> out) const = 0;

  /// Values and dense `output_dim x input_dim` Jacobian.
  virtual void evaluate_jacobian(std::span<const double> x, std::span<double> out,
                                 Eigen::Ref<Eigen::MatrixXd> jac) const = 0;

  /// Dense Hessian of `sum_k weights[k] * f_k(x)`.
  virtual void weighted_hessian(std::span<const double> x, std::span<const double> weights,
                                Eigen::Ref<Eigen::MatrixXd> hess) const = 0;

 protected:
  LocalPattern pattern_;

 private:
  int input_dim_;
  int output_dim_;
  std::string name_;
};

namespace detail {

template <typename F, int Chunk>
class AutoDiffLocalFunction final : public LocalFunction {
 public:
  AutoDiffLocalFunction(int input_dim, int output_dim, std::string name, F f)
      : LocalFunction(input_dim, output_dim, std::move(name)), f_(std::move(f)) {
    if (input_dim <= 0 || output_dim <= 0) {
      throw std::invalid_argument("local function dimensions must be positive");
    }
    if (input_dim > CurvatureTracer::kMaxInputs) {
      throw std::invalid_argument("local function '" + this->name() + "' has more than 64 inputs");
    }
    trace_pattern();
  }

  void evaluate(std::span<const double> x, std::span<double> out) const override {
    check(x.size(), out.size());
    f_(x, out);
  }

  void evaluate_jacobian(std::span<const double> x, std::span<double> out,
                         Eigen::Ref<Eigen::MatrixXd> jac) const override {
    check(x.size(), out.size());
    const int n = input_dim();
    const int m = output_dim();
    std::vector<Dual<double, Chunk>> xs(static_cast<std::size_t>(n));
    std::vector<Dual<double, Chunk>> ys(static_cast<std::size_t>(m));
    for (int begin = 0; begin < n; begin += Chunk) {
      for (int i = 0; i < n; ++i) {
        auto& xi = xs[static_cast<std::size_t>(i)];
        xi.value = x[static_cast<std::size_t>(i)];
        xi.partials.fill(0.0);
        const int k = i - begin;
        if (k >= 0 && k < Chunk) xi.partials[static_cast<std::size_t>(k)] = 1.0;
      }
      f_(std::span<const Dual<double, Chunk>>(xs), std::span<Dual<double, Chunk>>(ys));
      const int width = std::min(Chunk, n - begin);
      for (int r = 0; r < m; ++r) {
        const auto& y = ys[static_cast<std::size_t>(r)];
        if (begin == 0) out[static_cast<std::size_t>(r)] = y.value;
        for (int k = 0; k < width; ++k) jac(r, begin + k) = y.partials[static_cast<std::size_t>(k)];
      }
    }
  }

  void weighted_hessian(std::span<const double> x, std::span<const double> weights,
                        Eigen::Ref<Eigen::MatrixXd> hess) const override {
    const int n = input_dim();
    const int m = output_dim();
    if (static_cast<int>(x.size()) != n || static_cast<int>(weights.size()) != m) {
      throw std::invalid_argument("weighted_hessian: dimension mismatch in '" + name() + "'");
    }
    using D2 = Dual<Dual<double, Chunk>, Chunk>;
    hess.setZero();
    std::vector<D2> xs(static_cast<std::size_t>(n));
    std::vector<D2> ys(static_cast<std::size_t>(m));
    for (int rb = 0; rb < n; rb += Chunk) {
      for (int cb = rb; cb < n; cb += Chunk) {
        if (!block_has_curvature(rb, cb)) continue;
        for (int i = 0; i < n; ++i) {
          auto& xi = xs[static_cast<std::size_t>(i)];
          xi = D2(x[static_cast<std::size_t>(i)]);
          const int c = i - cb;
          if (c >= 0 && c < Chunk) xi.value.partials[static_cast<std::size_t>(c)] = 1.0;
          const int r = i - rb;
          if (r >= 0 && r < Chunk) xi.partials[static_cast<std::size_t>(r)].value = 1.0;
        }
        f_(std::span<const D2>(xs), std::span<D2>(ys));
        const int rw = std::min(Chunk, n - rb);
        const int cw = std::min(Chunk, n - cb);
        for (int k = 0; k < m; ++k) {
          const double w = weights[static_cast<std::size_t>(k)];
          if (w == 0.0) continue;
          const auto& y = ys[static_cast<std::size_t>(k)];
          for (int r = 0; r < rw; ++r) {
            for (int c = 0; c < cw; ++c) {
              hess(rb + r, cb + c) +=
                  w * y.partials[static_cast<std::size_t>(r)].partials[static_cast<std::size_t>(c)];
            }
          }
        }
      }
    }
    // Mirror the strictly upper chunk blocks.
    for (int r = 0; r < n; ++r) {
      for (int c = r + 1; c < n; ++c) {
        if ((r / Chunk) != (c / Chunk)) hess(c, r) = hess(r, c);
      }
    }
  }

 private:
  void check(std::size_t n, std::size_t m) const {
    if (static_cast<int>(n) != input_dim() || static_cast<int>(m) != output_dim()) {
      throw std::invalid_argument("local function '" + name() + "': dimension mismatch");
    }
  }

  bool block_has_curvature(int rb, int cb) const {
    const int n = input_dim();
    std::uint64_t cols = 0;
    for (int c = cb; c < std::min(cb + Chunk, n); ++c) cols |= std::uint64_t{1} << c;
    for (int r = rb; r < std::min(rb + Chunk, n); ++r) {
      if ((pattern_.hessian_rows[static_cast<std::size_t>(r)] & cols) != 0) return true;
    }
    return false;
  }

  void trace_pattern() {
    const int n = input_dim();
    const int m = output_dim();
    std::vector<CurvatureTracer> xs;
    xs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs.push_back(CurvatureTracer::variable(i));
    std::vector<CurvatureTracer> ys(static_cast<std::size_t>(m));
    f_(std::span<const CurvatureTracer>(xs), std::span<CurvatureTracer>(ys));
    pattern_.jacobian_rows.assign(static_cast<std::size_t>(m), 0);
    pattern_.hessian_rows.assign(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < m; ++k) {
      const auto& y = ys[static_cast<std::size_t>(k)];
      pattern_.jacobian_rows[static_cast<std::size_t>(k)] = y.gradient_mask();
      for (int i = 0; i < n; ++i) pattern_.hessian_rows[static_cast<std::size_t>(i)] |= y.hessian_row(i);
    }
    for (int i = 0; i < n; ++i) {
      // Symmetrize: products record both orientations, divisions may not.
      for (int j = 0; j < n; ++j) {
        if ((pattern_.hessian_rows[static_cast<std::size_t>(i)] >> j) & 1U) {
          pattern_.hessian_rows[static_cast<std::size_t>(j)] |= std::uint64_t{1} << i;
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      if (pattern_.hessian_rows[static_cast<std::size_t>(i)] != 0) {
        pattern_.curved_inputs |= std::uint64_t{1} << i;
      }
    }
  }

  F f_;
};

}  // namespace detail

/// Wraps a generic callable `f(std::span<const S> x, std::span<S> out)`.
template <int Chunk = kDefaultChunk, typename F>
std::shared_ptr<const LocalFunction> make_local_function(int input_dim, int output_dim, std::string name,
                                                         F f) {
  return std::make_shared<detail::AutoDiffLocalFunction<F, Chunk>>(input_dim, output_dim, std::move(name),
                                                                  std::move(f));
}

}  // namespace cgames::autodiff
