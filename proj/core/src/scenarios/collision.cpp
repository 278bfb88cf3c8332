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

#include "cgames/scenarios/collision.hpp"

namespace cgames::scenarios {

double lse_smooth_max(const std::vector<double>& values, double alpha) {
  return lse_smooth_max(std::span<const double>(values), alpha);
}

CollisionGeometry CollisionGeometry::box(double length, double width, int blocked_side) {
  if (!(length > 0.0) || !(width > 0.0)) throw std::invalid_argument("collision box scales must be positive");
  if (blocked_side != 1 && blocked_side != -1) throw std::invalid_argument("blocked side must be +1 or -1");
  CollisionGeometry g;
  g.n_top = Eigen::Vector2d(1.0 / length, 0.0);
  g.n_bottom = Eigen::Vector2d(-1.0 / length, 0.0);
  g.n_side = Eigen::Vector2d(0.0, -static_cast<double>(blocked_side) / width);
  return g;
}

double collision_constraint(const Eigen::Vector2d& d, const CollisionGeometry& geometry, double alpha) {
  return collision_constraint(d[0], d[1], geometry, alpha);
}

}  // namespace cgames::scenarios
