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
#include <cmath>
#include <stdexcept>
#include <string>

namespace cgames::autodiff {

/// Raised when log/sqrt are evaluated outside of their (differentiable) domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Forward-mode dual number carrying `N` directional derivatives.
///
/// `N` is the chunk width: derivatives with respect to an arbitrary number of
/// inputs are obtained by sweeping over the inputs in chunks of `N` seeds.
/// Nesting (`Dual<Dual<double, N>, N>`) yields second derivatives.
template <typename T, int N>
struct Dual {
  static_assert(N > 0, "chunk width must be positive");

  T value{};
  std::array<T, N> partials{};

  Dual() = default;
  // NOLINTNEXTLINE(google-explicit-constructor)
  Dual(double constant) : value(constant) {}
  Dual(T v, const std::array<T, N>& d) : value(std::move(v)), partials(d) {}

  Dual& operator+=(const Dual& o) {
    value += o.value;
    for (int i = 0; i < N; ++i) partials[i] += o.partials[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value -= o.value;
    for (int i = 0; i < N; ++i) partials[i] -= o.partials[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) partials[i] = partials[i] * o.value + value * o.partials[i];
    value *= o.value;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const T inv = T(1.0) / o.value;
    const T q = value * inv;
    for (int i = 0; i < N; ++i) partials[i] = (partials[i] - q * o.partials[i]) * inv;
    value = q;
    return *this;
  }
  Dual& operator+=(double c) {
    value += c;
    return *this;
  }
  Dual& operator-=(double c) {
    value -= c;
    return *this;
  }
  Dual& operator*=(double c) {
    value *= c;
    for (auto& p : partials) p *= c;
    return *this;
  }
  Dual& operator/=(double c) { return *this *= (1.0 / c); }
};

template <typename T>
struct is_dual : std::false_type {};
template <typename T, int N>
struct is_dual<Dual<T, N>> : std::true_type {};

/// Innermost primal value of a (possibly nested) dual number.
inline double primal(double x) { return x; }
template <typename T, int N>
double primal(const Dual<T, N>& x) {
  return primal(x.value);
}

// Arithmetic ---------------------------------------------------------------

template <typename T, int N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.value = -a.value;
  for (int i = 0; i < N; ++i) r.partials[i] = -a.partials[i];
  return r;
}
template <typename T, int N>
Dual<T, N> operator+(const Dual<T, N>& a) {
  return a;
}

template <typename T, int N>
Dual<T, N> operator+(Dual<T, N> a, const Dual<T, N>& b) {
  return a += b;
}
template <typename T, int N>
Dual<T, N> operator-(Dual<T, N> a, const Dual<T, N>& b) {
  return a -= b;
}
template <typename T, int N>
Dual<T, N> operator*(Dual<T, N> a, const Dual<T, N>& b) {
  return a *= b;
}
template <typename T, int N>
Dual<T, N> operator/(Dual<T, N> a, const Dual<T, N>& b) {
  return a /= b;
}

template <typename T, int N>
Dual<T, N> operator+(Dual<T, N> a, double c) {
  return a += c;
}
template <typename T, int N>
Dual<T, N> operator+(double c, Dual<T, N> a) {
  return a += c;
}
template <typename T, int N>
Dual<T, N> operator-(Dual<T, N> a, double c) {
  return a -= c;
}
template <typename T, int N>
Dual<T, N> operator-(double c, const Dual<T, N>& a) {
  Dual<T, N> r = -a;
  r.value += c;
  return r;
}
template <typename T, int N>
Dual<T, N> operator*(Dual<T, N> a, double c) {
  return a *= c;
}
template <typename T, int N>
Dual<T, N> operator*(double c, Dual<T, N> a) {
  return a *= c;
}
template <typename T, int N>
Dual<T, N> operator/(Dual<T, N> a, double c) {
  return a /= c;
}
template <typename T, int N>
Dual<T, N> operator/(double c, const Dual<T, N>& a) {
  return Dual<T, N>(c) / a;
}

// Elementary functions -----------------------------------------------------
//
// Each primitive applies the chain rule with the derivative evaluated on the
// (possibly dual) value, so nesting produces exact higher derivatives.

namespace detail {
template <typename T, int N, typename D>
Dual<T, N> chain(const Dual<T, N>& a, T f, const D& df) {
  Dual<T, N> r;
  r.value = std::move(f);
  for (int i = 0; i < N; ++i) r.partials[i] = df * a.partials[i];
  return r;
}
}  // namespace detail

template <typename T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return detail::chain(a, T(sin(a.value)), T(cos(a.value)));
}

template <typename T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return detail::chain(a, T(cos(a.value)), T(-sin(a.value)));
}

template <typename T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  using std::exp;
  T e = exp(a.value);
  return detail::chain(a, e, e);
}

template <typename T, int N>
Dual<T, N> log(const Dual<T, N>& a) {
  using std::log;
  if (!(primal(a.value) > 0.0)) {
    throw DomainError("log evaluated at non-positive argument " + std::to_string(primal(a.value)));
  }
  return detail::chain(a, T(log(a.value)), T(1.0 / a.value));
}

template <typename T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using std::sqrt;
  if (!(primal(a.value) > 0.0)) {
    throw DomainError("sqrt differentiated at non-positive argument " +
                      std::to_string(primal(a.value)));
  }
  T s = sqrt(a.value);
  return detail::chain(a, s, T(0.5 / s));
}

template <typename T>
T square(const T& a) {
  return a * a;
}

// Nonsmooth primitives have no Newton-compatible derivative; expressions that
// use them do not compile for dual arguments. Use a smooth surrogate instead.
template <typename T, int N>
Dual<T, N> abs(const Dual<T, N>&) = delete;
template <typename T, int N>
Dual<T, N> fabs(const Dual<T, N>&) = delete;
template <typename T, int N>
Dual<T, N> max(const Dual<T, N>&, const Dual<T, N>&) = delete;
template <typename T, int N>
Dual<T, N> min(const Dual<T, N>&, const Dual<T, N>&) = delete;
template <typename T, int N>
Dual<T, N> fmax(const Dual<T, N>&, const Dual<T, N>&) = delete;
template <typename T, int N>
Dual<T, N> fmin(const Dual<T, N>&, const Dual<T, N>&) = delete;

}  // namespace cgames::autodiff
