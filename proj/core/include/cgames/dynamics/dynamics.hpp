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

#include <cmath>
#include <memory>

#include "cgames/autodiff/local_function.hpp"

namespace cgames::dynamics {

/// Planar point mass: state (p1, p2, v1, v2), control (a1, a2).
struct PointMassParams {
  double dt = 0.2;
  double v_min = -2.0;  // per axis
  double v_max = 2.0;
  double a_min = -1.0;  // per axis
  double a_max = 1.0;

  void validate() const;
};

/// Kinematic unicycle: state (p1, p2, v, psi), control (a, omega).
struct UnicycleParams {
  double dt = 0.2;
  double v_min = 0.0;
  double v_max = 12.0;
  double a_min = -4.0;
  double a_max = 3.0;
  double omega_min = -1.0;
  double omega_max = 1.0;

  void validate() const;
};

inline constexpr int kPointMassStateDim = 4;
inline constexpr int kPointMassControlDim = 2;
inline constexpr int kUnicycleStateDim = 4;
inline constexpr int kUnicycleControlDim = 2;

/// Generic point-mass step; `S` is double, a dual number or a tracer.
template <typename S>
void point_mass_step(const S* x, const S* u, double dt, S* out) {
  const double half_dt2 = 0.5 * dt * dt;
  out[0] = x[0] + dt * x[2] + half_dt2 * u[0];
  out[1] = x[1] + dt * x[3] + half_dt2 * u[1];
  out[2] = x[2] + dt * u[0];
  out[3] = x[3] + dt * u[1];
}

/// Generic unicycle step. Position advances along the updated heading with
/// the updated speed over one interval of length dt.
template <typename S>
void unicycle_step(const S* x, const S* u, double dt, S* out) {
  using std::cos;
  using std::sin;
  const S heading = x[3] + dt * u[1];
  const S speed = x[2] + dt * u[0];
  out[0] = x[0] + dt * cos(heading) * speed;
  out[1] = x[1] + dt * sin(heading) * speed;
  out[2] = speed;
  out[3] = heading;
}

Eigen::Vector4d point_mass_step(const Eigen::Vector4d& x, const Eigen::Vector2d& u, const PointMassParams& params);
Eigen::Vector4d unicycle_step(const Eigen::Vector4d& x, const Eigen::Vector2d& u, const UnicycleParams& params);

/// Componentwise box bounds of a player; infinite entries are unbounded.
struct BoxBounds {
  Eigen::VectorXd state_lower;
  Eigen::VectorXd state_upper;
  Eigen::VectorXd control_lower;
  Eigen::VectorXd control_upper;
};

BoxBounds box_bounds(const PointMassParams& params);
BoxBounds box_bounds(const UnicycleParams& params);

/// Stacked inequality values (value - lower, upper - value) for every finite
/// bound, over every column of `states` and `controls` (columns are time
/// steps). Entries are >= 0 exactly when the trajectory respects the box.
Eigen::VectorXd bound_constraints(const BoxBounds& bounds, const Eigen::MatrixXd& states,
                                  const Eigen::MatrixXd& controls);
Eigen::VectorXd bound_constraints(const PointMassParams& params, const Eigen::MatrixXd& states,
                                  const Eigen::MatrixXd& controls);
Eigen::VectorXd bound_constraints(const UnicycleParams& params, const Eigen::MatrixXd& states,
                                  const Eigen::MatrixXd& controls);

/// Step maps as differentiable local functions of the stacked input (x, u).
std::shared_ptr<const autodiff::LocalFunction> make_point_mass_dynamics(const PointMassParams& params);
std::shared_ptr<const autodiff::LocalFunction> make_unicycle_dynamics(const UnicycleParams& params);

}  // namespace cgames::dynamics
