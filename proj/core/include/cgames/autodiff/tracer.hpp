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

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

namespace cgames::autodiff {

/// Symbolic scalar that records which inputs an expression touches.
///
/// Evaluating a function once on tracers yields a superset of the structural
/// Jacobian pattern: every arithmetic operation unions the input sets.
class DependencyTracer {
 public:
  DependencyTracer() = default;
  // NOLINTNEXTLINE(google-explicit-constructor)
  DependencyTracer(double /*constant*/) {}

  static DependencyTracer variable(int index) {
    DependencyTracer t;
    t.set(index);
    return t;
  }

  bool depends_on(int index) const {
    const auto word = static_cast<std::size_t>(index / 64);
    return word < bits_.size() && ((bits_[word] >> (index % 64)) & 1U) != 0;
  }

  std::vector<int> indices() const {
    std::vector<int> out;
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t word = bits_[w];
      while (word != 0) {
        out.push_back(static_cast<int>(w * 64 + std::countr_zero(word)));
        word &= word - 1;
      }
    }
    return out;
  }

  DependencyTracer& merge(const DependencyTracer& o) {
    if (o.bits_.size() > bits_.size()) bits_.resize(o.bits_.size(), 0);
    for (std::size_t w = 0; w < o.bits_.size(); ++w) bits_[w] |= o.bits_[w];
    return *this;
  }

  DependencyTracer& operator+=(const DependencyTracer& o) { return merge(o); }
  DependencyTracer& operator-=(const DependencyTracer& o) { return merge(o); }
  DependencyTracer& operator*=(const DependencyTracer& o) { return merge(o); }
  DependencyTracer& operator/=(const DependencyTracer& o) { return merge(o); }
  DependencyTracer& operator+=(double) { return *this; }
  DependencyTracer& operator-=(double) { return *this; }
  DependencyTracer& operator*=(double) { return *this; }
  DependencyTracer& operator/=(double) { return *this; }

 private:
  void set(int index) {
    const auto word = static_cast<std::size_t>(index / 64);
    if (word >= bits_.size()) bits_.resize(word + 1, 0);
    bits_[word] |= std::uint64_t{1} << (index % 64);
  }

  std::vector<std::uint64_t> bits_;
};

inline DependencyTracer operator-(const DependencyTracer& a) { return a; }
inline DependencyTracer operator+(DependencyTracer a, const DependencyTracer& b) { return a += b; }
inline DependencyTracer operator-(DependencyTracer a, const DependencyTracer& b) { return a -= b; }
inline DependencyTracer operator*(DependencyTracer a, const DependencyTracer& b) { return a *= b; }
inline DependencyTracer operator/(DependencyTracer a, const DependencyTracer& b) { return a /= b; }
inline DependencyTracer operator+(DependencyTracer a, double) { return a; }
inline DependencyTracer operator+(double, DependencyTracer a) { return a; }
inline DependencyTracer operator-(DependencyTracer a, double) { return a; }
inline DependencyTracer operator-(double, DependencyTracer a) { return a; }
inline DependencyTracer operator*(DependencyTracer a, double) { return a; }
inline DependencyTracer operator*(double, DependencyTracer a) { return a; }
inline DependencyTracer operator/(DependencyTracer a, double) { return a; }
inline DependencyTracer operator/(double, DependencyTracer a) { return a; }
inline DependencyTracer sin(DependencyTracer a) { return a; }
inline DependencyTracer cos(DependencyTracer a) { return a; }
inline DependencyTracer exp(DependencyTracer a) { return a; }
inline DependencyTracer log(DependencyTracer a) { return a; }
inline DependencyTracer sqrt(DependencyTracer a) { return a; }
inline double primal(const DependencyTracer&) { return 0.0; }

/// Second-order sparsity tracer for local functions of at most 64 inputs.
///
/// Tracks the inputs a value depends on and the set of input pairs that
/// interact nonlinearly; the latter is the structural Hessian pattern.
class CurvatureTracer {
 public:
  static constexpr int kMaxInputs = 64;

  CurvatureTracer() = default;
  // NOLINTNEXTLINE(google-explicit-constructor)
  CurvatureTracer(double /*constant*/) {}

  static CurvatureTracer variable(int index) {
    CurvatureTracer t;
    t.grad_ = std::uint64_t{1} << index;
    return t;
  }

  std::uint64_t gradient_mask() const { return grad_; }
  std::uint64_t hessian_row(int i) const { return hess_[static_cast<std::size_t>(i)]; }

  // Linear combination: union of both structures.
  CurvatureTracer& operator+=(const CurvatureTracer& o) {
    grad_ |= o.grad_;
    for (int i = 0; i < kMaxInputs; ++i) hess_[i] |= o.hess_[i];
    return *this;
  }
  CurvatureTracer& operator-=(const CurvatureTracer& o) { return *this += o; }
  // Product: cross terms between the two dependency sets become curvature.
  CurvatureTracer& operator*=(const CurvatureTracer& o) {
    const std::uint64_t a = grad_;
    const std::uint64_t b = o.grad_;
    *this += o;
    add_outer(a, b);
    add_outer(b, a);
    return *this;
  }
  CurvatureTracer& operator/=(const CurvatureTracer& o) {
    const std::uint64_t a = grad_;
    const std::uint64_t b = o.grad_;
    *this += o;
    add_outer(a, b);
    add_outer(b, a);
    add_outer(b, b);
    return *this;
  }
  CurvatureTracer& operator+=(double) { return *this; }
  CurvatureTracer& operator-=(double) { return *this; }
  CurvatureTracer& operator*=(double) { return *this; }
  CurvatureTracer& operator/=(double) { return *this; }

  /// Nonlinear unary function: all dependencies interact.
  CurvatureTracer nonlinear() const {
    CurvatureTracer r = *this;
    r.add_outer(grad_, grad_);
    return r;
  }

 private:
  void add_outer(std::uint64_t rows, std::uint64_t cols) {
    while (rows != 0) {
      const int i = std::countr_zero(rows);
      hess_[static_cast<std::size_t>(i)] |= cols;
      rows &= rows - 1;
    }
  }

  std::uint64_t grad_ = 0;
  std::array<std::uint64_t, kMaxInputs> hess_{};
};

inline CurvatureTracer operator-(const CurvatureTracer& a) { return a; }
inline CurvatureTracer operator+(CurvatureTracer a, const CurvatureTracer& b) { return a += b; }
inline CurvatureTracer operator-(CurvatureTracer a, const CurvatureTracer& b) { return a -= b; }
inline CurvatureTracer operator*(CurvatureTracer a, const CurvatureTracer& b) { return a *= b; }
inline CurvatureTracer operator/(CurvatureTracer a, const CurvatureTracer& b) { return a /= b; }
inline CurvatureTracer operator+(CurvatureTracer a, double) { return a; }
inline CurvatureTracer operator+(double, CurvatureTracer a) { return a; }
inline CurvatureTracer operator-(CurvatureTracer a, double) { return a; }
inline CurvatureTracer operator-(double, CurvatureTracer a) { return a; }
inline CurvatureTracer operator*(CurvatureTracer a, double) { return a; }
inline CurvatureTracer operator*(double, CurvatureTracer a) { return a; }
inline CurvatureTracer operator/(CurvatureTracer a, double) { return a; }
inline CurvatureTracer operator/(double, const CurvatureTracer& a) { return a.nonlinear(); }
inline CurvatureTracer sin(const CurvatureTracer& a) { return a.nonlinear(); }
inline CurvatureTracer cos(const CurvatureTracer& a) { return a.nonlinear(); }
inline CurvatureTracer exp(const CurvatureTracer& a) { return a.nonlinear(); }
inline CurvatureTracer log(const CurvatureTracer& a) { return a.nonlinear(); }
inline CurvatureTracer sqrt(const CurvatureTracer& a) { return a.nonlinear(); }
inline double primal(const CurvatureTracer&) { return 0.0; }

}  // namespace cgames::autodiff
