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

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "cgames/autodiff/dual.hpp"

namespace cgames::scenarios {

/// Log-sum-exp smooth maximum (1/alpha) log sum_i exp(alpha c_i), shifted by
/// the largest value so that large arguments do not overflow. The shift is a
/// constant for differentiation purposes, so derivatives are exact.
template <typename S>
S lse_smooth_max(std::span<const S> values, double alpha) {
  using autodiff::primal;
  using std::exp;
  using std::log;
  if (values.empty()) throw std::invalid_argument("lse_smooth_max: empty input");
  if (!(alpha > 0.0)) throw std::invalid_argument("lse_smooth_max: alpha must be positive");
  double shift = primal(values[0]);
  for (const auto& v : values) shift = std::max(shift, primal(v));
  S sum(0.0);
  for (const auto& v : values) sum = sum + exp(alpha * (v - shift));
  return shift + log(sum) / alpha;
}

double lse_smooth_max(const std::vector<double>& values, double alpha);

/// Half-plane normals describing the obstacle around player j in the frame
/// of the relative position d = p_i - p_j. The fourth side is open, so
/// player i cannot pass j on that side.
struct CollisionGeometry {
  Eigen::Vector2d n_top;
  Eigen::Vector2d n_side;
  Eigen::Vector2d n_bottom;

  /// Longitudinal half-planes at +-length, side half-plane at `width` on the
  /// side opposite to `blocked_side` (+1 blocks +p2, -1 blocks -p2).
  static CollisionGeometry box(double length, double width, int blocked_side);
};

/// LSE_alpha(d^T n_top - 1, d^T n_side - 1, d^T n_bottom - 1); the pair is
/// collision-free when this is nonnegative.
template <typename S>
S collision_constraint(const S& d1, const S& d2, const CollisionGeometry& g, double alpha) {
  const S c[3] = {d1 * g.n_top[0] + d2 * g.n_top[1] - 1.0, d1 * g.n_side[0] + d2 * g.n_side[1] - 1.0,
                  d1 * g.n_bottom[0] + d2 * g.n_bottom[1] - 1.0};
  return lse_smooth_max(std::span<const S>(c, 3), alpha);
}

double collision_constraint(const Eigen::Vector2d& d, const CollisionGeometry& geometry, double alpha);

}  // namespace cgames::scenarios
