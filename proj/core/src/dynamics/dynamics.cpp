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

#include "cgames/dynamics/dynamics.hpp"

#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgames::dynamics {

namespace {

void require_interval(double lo, double hi, const char* what) {
  if (!(lo < hi)) throw std::invalid_argument(std::string(what) + ": lower bound must be below upper bound");
}

}  // namespace

void PointMassParams::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("point mass: dt must be positive");
  require_interval(v_min, v_max, "point mass velocity");
  require_interval(a_min, a_max, "point mass acceleration");
}

void UnicycleParams::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("unicycle: dt must be positive");
  require_interval(v_min, v_max, "unicycle speed");
  require_interval(a_min, a_max, "unicycle acceleration");
  require_interval(omega_min, omega_max, "unicycle yaw rate");
}

Eigen::Vector4d point_mass_step(const Eigen::Vector4d& x, const Eigen::Vector2d& u, const PointMassParams& params) {
  Eigen::Vector4d out;
  point_mass_step(x.data(), u.data(), params.dt, out.data());
  return out;
}

Eigen::Vector4d unicycle_step(const Eigen::Vector4d& x, const Eigen::Vector2d& u, const UnicycleParams& params) {
  Eigen::Vector4d out;
  unicycle_step(x.data(), u.data(), params.dt, out.data());
  return out;
}

BoxBounds box_bounds(const PointMassParams& params) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoxBounds b;
  b.state_lower = Eigen::Vector4d(-inf, -inf, params.v_min, params.v_min);
  b.state_upper = Eigen::Vector4d(inf, inf, params.v_max, params.v_max);
  b.control_lower = Eigen::Vector2d(params.a_min, params.a_min);
  b.control_upper = Eigen::Vector2d(params.a_max, params.a_max);
  return b;
}

BoxBounds box_bounds(const UnicycleParams& params) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoxBounds b;
  b.state_lower = Eigen::Vector4d(-inf, -inf, params.v_min, -inf);
  b.state_upper = Eigen::Vector4d(inf, inf, params.v_max, inf);
  b.control_lower = Eigen::Vector2d(params.a_min, params.omega_min);
  b.control_upper = Eigen::Vector2d(params.a_max, params.omega_max);
  return b;
}

Eigen::VectorXd bound_constraints(const BoxBounds& bounds, const Eigen::MatrixXd& states,
                                  const Eigen::MatrixXd& controls) {
  if (states.rows() != bounds.state_lower.size() || controls.rows() != bounds.control_lower.size()) {
    throw std::invalid_argument("bound_constraints: trajectory dimensions do not match the bounds");
  }
  std::vector<double> out;
  auto push = [&out](const Eigen::MatrixXd& values, const Eigen::VectorXd& lo, const Eigen::VectorXd& up) {
    for (Eigen::Index t = 0; t < values.cols(); ++t) {
      for (Eigen::Index k = 0; k < values.rows(); ++k) {
        if (std::isfinite(lo[k])) out.push_back(values(k, t) - lo[k]);
        if (std::isfinite(up[k])) out.push_back(up[k] - values(k, t));
      }
    }
  };
  push(states, bounds.state_lower, bounds.state_upper);
  push(controls, bounds.control_lower, bounds.control_upper);
  return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Eigen::VectorXd bound_constraints(const PointMassParams& params, const Eigen::MatrixXd& states,
                                  const Eigen::MatrixXd& controls) {
  return bound_constraints(box_bounds(params), states, controls);
}

Eigen::VectorXd bound_constraints(const UnicycleParams& params, const Eigen::MatrixXd& states,
                                  const Eigen::MatrixXd& controls) {
  return bound_constraints(box_bounds(params), states, controls);
}

std::shared_ptr<const autodiff::LocalFunction> make_point_mass_dynamics(const PointMassParams& params) {
  params.validate();
  const double dt = params.dt;
  return autodiff::make_local_function(6, 4, "point_mass_step", [dt](auto x, auto out) {
    point_mass_step(x.data(), x.data() + 4, dt, out.data());
  });
}

std::shared_ptr<const autodiff::LocalFunction> make_unicycle_dynamics(const UnicycleParams& params) {
  params.validate();
  const double dt = params.dt;
  return autodiff::make_local_function(6, 4, "unicycle_step", [dt](auto x, auto out) {
    unicycle_step(x.data(), x.data() + 4, dt, out.data());
  });
}

}  // namespace cgames::dynamics
