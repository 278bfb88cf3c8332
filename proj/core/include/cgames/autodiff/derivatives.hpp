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
#include <Eigen/SparseCore>

#include <algorithm>
#include <span>
#include <vector>

#include "cgames/autodiff/dual.hpp"
#include "cgames/autodiff/tracer.hpp"

// Chunked forward-mode differentiation of generic callables.
//
// Scalar functions are callables `S f(std::span<const S>)`; vector functions
// return `std::vector<S>`. Both must be templated on the scalar type `S` (a
// generic lambda is the usual form) so that they can be evaluated on doubles,
// dual numbers and sparsity tracers alike.

namespace cgames::autodiff {

inline constexpr int kDefaultChunk = 8;

namespace detail {

template <int Chunk>
using Dual1 = Dual<double, Chunk>;
template <int Chunk>
using Dual2 = Dual<Dual<double, Chunk>, Chunk>;

// Seeds inputs [begin, begin + Chunk) with unit directions.
template <int Chunk>
std::vector<Dual1<Chunk>> seed(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index begin) {
  std::vector<Dual1<Chunk>> xs(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    auto& xi = xs[static_cast<std::size_t>(i)];
    xi.value = x[i];
    const Eigen::Index k = i - begin;
    if (k >= 0 && k < Chunk) xi.partials[static_cast<std::size_t>(k)] = 1.0;
  }
  return xs;
}

// Seeds nested duals: outer directions at `row_begin`, inner at `col_begin`.
template <int Chunk>
std::vector<Dual2<Chunk>> seed2(const Eigen::Ref<const Eigen::VectorXd>& x,
                                Eigen::Index row_begin, Eigen::Index col_begin) {
  std::vector<Dual2<Chunk>> xs(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    auto& xi = xs[static_cast<std::size_t>(i)];
    xi.value.value = x[i];
    const Eigen::Index c = i - col_begin;
    if (c >= 0 && c < Chunk) xi.value.partials[static_cast<std::size_t>(c)] = 1.0;
    const Eigen::Index r = i - row_begin;
    if (r >= 0 && r < Chunk) xi.partials[static_cast<std::size_t>(r)].value = 1.0;
  }
  return xs;
}

template <typename S, typename F>
auto call(const F& f, const std::vector<S>& xs) {
  return f(std::span<const S>(xs.data(), xs.size()));
}

}  // namespace detail

/// Value of a scalar function at `x`.
template <typename F>
double value(const F& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
  std::vector<double> xs(x.data(), x.data() + x.size());
  return detail::call(f, xs);
}

/// Gradient of a scalar function; evaluates `f` once per chunk of inputs.
template <int Chunk = kDefaultChunk, typename F>
Eigen::VectorXd gradient(const F& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index begin = 0; begin < x.size(); begin += Chunk) {
    const auto xs = detail::seed<Chunk>(x, begin);
    const auto y = detail::call(f, xs);
    const Eigen::Index width = std::min<Eigen::Index>(Chunk, x.size() - begin);
    for (Eigen::Index k = 0; k < width; ++k) g[begin + k] = y.partials[static_cast<std::size_t>(k)];
  }
  return g;
}

/// Dense Jacobian of a vector function.
template <int Chunk = kDefaultChunk, typename F>
Eigen::MatrixXd jacobian_dense(const F& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::MatrixXd jac;
  Eigen::Index begin = 0;
  do {
    const auto xs = detail::seed<Chunk>(x, begin);
    const auto ys = detail::call(f, xs);
    if (begin == 0) jac.setZero(static_cast<Eigen::Index>(ys.size()), x.size());
    const Eigen::Index width = std::min<Eigen::Index>(Chunk, x.size() - begin);
    for (Eigen::Index i = 0; i < jac.rows(); ++i) {
      for (Eigen::Index k = 0; k < width; ++k) {
        jac(i, begin + k) = ys[static_cast<std::size_t>(i)].partials[static_cast<std::size_t>(k)];
      }
    }
    begin += Chunk;
  } while (begin < x.size());
  return jac;
}

/// Structural Jacobian pattern: for each output, the inputs it touches.
template <typename F>
std::vector<std::vector<int>> jacobian_pattern(const F& f, Eigen::Index input_dim) {
  std::vector<DependencyTracer> xs;
  xs.reserve(static_cast<std::size_t>(input_dim));
  for (Eigen::Index i = 0; i < input_dim; ++i) xs.push_back(DependencyTracer::variable(static_cast<int>(i)));
  const auto ys = detail::call(f, xs);
  std::vector<std::vector<int>> rows;
  rows.reserve(ys.size());
  for (const auto& y : ys) rows.push_back(y.indices());
  return rows;
}

/// Sparse Jacobian whose stored pattern is the traced structural pattern.
///
/// Entries that are structurally present but numerically zero at `x` are
/// stored explicitly, so the pattern does not depend on `x`.
template <int Chunk = kDefaultChunk, typename F>
Eigen::SparseMatrix<double> jacobian(const F& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto pattern = jacobian_pattern(f, x.size());
  const Eigen::MatrixXd dense = jacobian_dense<Chunk>(f, x);
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    for (int j : pattern[i]) entries.emplace_back(static_cast<int>(i), j, dense(static_cast<Eigen::Index>(i), j));
  }
  Eigen::SparseMatrix<double> jac(static_cast<Eigen::Index>(pattern.size()), x.size());
  jac.setFromTriplets(entries.begin(), entries.end());
  return jac;
}

/// Dense Hessian of a scalar function via forward-over-forward duals.
template <int Chunk = kDefaultChunk, typename F>
Eigen::MatrixXd hessian(const F& f, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index rb = 0; rb < n; rb += Chunk) {
    for (Eigen::Index cb = rb; cb < n; cb += Chunk) {
      const auto xs = detail::seed2<Chunk>(x, rb, cb);
      const auto y = detail::call(f, xs);
      const Eigen::Index rw = std::min<Eigen::Index>(Chunk, n - rb);
      const Eigen::Index cw = std::min<Eigen::Index>(Chunk, n - cb);
      for (Eigen::Index r = 0; r < rw; ++r) {
        for (Eigen::Index c = 0; c < cw; ++c) {
          const double h =
              y.partials[static_cast<std::size_t>(r)].partials[static_cast<std::size_t>(c)];
          hess(rb + r, cb + c) = h;
          hess(cb + c, rb + r) = h;
        }
      }
    }
  }
  return hess;
}

}  // namespace cgames::autodiff
