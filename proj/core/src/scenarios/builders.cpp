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

#include "cgames/scenarios/builders.hpp"

#include <cmath>

#include "cgames/autodiff/local_function.hpp"
#include "cgames/dynamics/dynamics.hpp"

namespace cgames::scenarios {

using game::ContingencyGame;
using game::LocalFunctionPtr;
using game::PlayerSpec;
using game::SharedConstraintSpec;

game::LocalFunctionPtr make_car_cost(const CarWeights& w, double target_lane, double reference_velocity) {
  return autodiff::make_local_function(6, 1, "car_cost", [w, target_lane, reference_velocity](auto x, auto out) {
    using std::cos;
    const auto lane = x[1] - target_lane;
    const auto progress = x[2] * cos(x[3]) - reference_velocity;
    out[0] = w.lane * lane * lane + w.progress * progress * progress + w.velocity * x[2] * x[2] +
             w.heading * x[3] * x[3] + w.acceleration * x[4] * x[4] + w.steering * x[5] * x[5];
  });
}

game::LocalFunctionPtr make_pedestrian_cost(const PedestrianWeights& w, const Eigen::Vector2d& goal) {
  const double g1 = goal[0];
  const double g2 = goal[1];
  return autodiff::make_local_function(6, 1, "pedestrian_cost", [w, g1, g2](auto x, auto out) {
    const auto e1 = x[0] - g1;
    const auto e2 = x[1] - g2;
    out[0] = w.goal * (e1 * e1 + e2 * e2) + w.velocity * (x[2] * x[2] + x[3] * x[3]) +
             w.acceleration * (x[4] * x[4] + x[5] * x[5]);
  });
}

game::LocalFunctionPtr make_collision(const CollisionGeometry& geometry, double alpha, int stage_dim_i,
                                      int stage_dim_j) {
  return autodiff::make_local_function(stage_dim_i + stage_dim_j, 1, "collision",
                                       [geometry, alpha, stage_dim_i](auto x, auto out) {
                                         const auto si = static_cast<std::size_t>(stage_dim_i);
                                         out[0] = collision_constraint(x[0] - x[si], x[1] - x[si + 1], geometry, alpha);
                                       });
}

namespace {

PlayerSpec make_car(const std::string& name, const ScenarioConfig& c, const CarAgent& agent, double target_lane) {
  auto params = c.car_bounds;
  params.dt = c.timestep;
  const auto bounds = dynamics::box_bounds(params);
  PlayerSpec p;
  p.name = name;
  p.state_dim = dynamics::kUnicycleStateDim;
  p.control_dim = dynamics::kUnicycleControlDim;
  p.dynamics = dynamics::make_unicycle_dynamics(params);
  p.initial_state = agent.initial_state;
  p.stage_costs.push_back({make_car_cost(c.car_weights, target_lane, agent.reference_velocity), {}, 1, -1});
  p.state_lower = bounds.state_lower;
  p.state_upper = bounds.state_upper;
  p.control_lower = bounds.control_lower;
  p.control_upper = bounds.control_upper;
  return p;
}

PlayerSpec make_pedestrian(const ScenarioConfig& c, const Eigen::Vector2d& goal) {
  auto params = c.pedestrian_bounds;
  params.dt = c.timestep;
  const auto bounds = dynamics::box_bounds(params);
  PlayerSpec p;
  p.name = "pedestrian";
  p.state_dim = dynamics::kPointMassStateDim;
  p.control_dim = dynamics::kPointMassControlDim;
  p.dynamics = dynamics::make_point_mass_dynamics(params);
  p.initial_state = c.jaywalking.pedestrian_initial_state;
  p.stage_costs.push_back({make_pedestrian_cost(c.pedestrian_weights, goal), {}, 1, -1});
  p.state_lower = bounds.state_lower;
  p.state_upper = bounds.state_upper;
  p.control_lower = bounds.control_lower;
  p.control_upper = bounds.control_upper;
  return p;
}

SharedConstraintSpec make_pair(const std::string& name, const ScenarioConfig& c, int i, int j, int blocked_side,
                               double ratio) {
  SharedConstraintSpec s;
  s.name = name;
  s.fn = make_collision(CollisionGeometry::box(c.collision.length, c.collision.width, blocked_side), c.lse_sharpness,
                        6, 6);
  s.participants = {i, j};
  s.multiplier_ratio = {ratio, 1.0};
  s.first_stage = 2;
  s.last_stage = -1;
  return s;
}

ContingencyGame skeleton(const ScenarioConfig& c) {
  ContingencyGame g;
  g.belief.hypotheses = c.hypotheses;
  g.belief.probabilities = c.belief;
  g.branching_time = c.branching_time;
  g.horizon = c.horizon;
  g.timestep = c.timestep;
  g.ego = make_car("ego", c, c.ego, c.ego.target_lane);
  return g;
}

}  // namespace

game::ContingencyGame build_jaywalking(const ScenarioConfig& config) {
  config.validate();
  if (config.scenario != ScenarioId::kJaywalking) throw ConfigError("build_jaywalking: scenario is not jaywalking");
  ContingencyGame g = skeleton(config);
  const auto& jw = config.jaywalking;
  for (const auto& label : config.hypotheses) {
    const double lateral = jw.goal_lateral.at(label);
    const Eigen::Vector2d goal(jw.pedestrian_initial_state[0] + jw.goal_longitudinal_offset, lateral);
    g.others.push_back({make_pedestrian(config, goal)});
    // The obstacle is open towards the goal: the ego passes behind.
    const int blocked = lateral >= config.ego.target_lane ? 1 : -1;
    g.shared_constraints.push_back({make_pair("ego_pedestrian", config, 0, 1, blocked, config.multiplier_ratio)});
  }
  g.validate();
  return g;
}

game::ContingencyGame build_overtaking(const ScenarioConfig& config) {
  config.validate();
  if (config.scenario != ScenarioId::kOvertaking) throw ConfigError("build_overtaking: scenario is not overtaking");
  ContingencyGame g = skeleton(config);
  const auto& ot = config.overtaking;
  const double middle = 0.5 * (ot.left_lane + ot.right_lane);
  auto side_of = [middle](double lane) { return lane >= middle ? 1 : -1; };
  for (const auto& label : config.hypotheses) {
    const double human_lane = ot.human_target_lane.at(label);
    g.others.push_back({make_car("human", config, ot.human, human_lane), make_car("lead", config, ot.lead, ot.lead.target_lane)});
    g.shared_constraints.push_back({
        make_pair("ego_human", config, 0, 1, side_of(human_lane), config.multiplier_ratio),
        make_pair("ego_lead", config, 0, 2, side_of(ot.lead.target_lane), config.multiplier_ratio),
        make_pair("human_lead", config, 1, 2, side_of(ot.lead.target_lane), ot.human_lead_ratio),
    });
  }
  g.validate();
  return g;
}

game::ContingencyGame build_game(const ScenarioConfig& config) {
  return config.scenario == ScenarioId::kJaywalking ? build_jaywalking(config) : build_overtaking(config);
}

ScenarioConfig with_swept_position(const ScenarioConfig& config, double p1, double p2) {
  ScenarioConfig c = config;
  if (c.scenario == ScenarioId::kJaywalking) {
    c.jaywalking.pedestrian_initial_state[0] = p1;
    c.jaywalking.pedestrian_initial_state[1] = p2;
  } else {
    c.overtaking.human.initial_state[0] = p1;
    c.overtaking.human.initial_state[1] = p2;
  }
  return c;
}

std::vector<Eigen::Vector2d> grid_positions(const SweepGrid& grid) {
  std::vector<Eigen::Vector2d> out;
  auto at = [](double lo, double hi, int n, int k) { return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (n - 1); };
  for (int a = 0; a < grid.n1; ++a) {
    for (int b = 0; b < grid.n2; ++b) {
      out.emplace_back(at(grid.p1_min, grid.p1_max, grid.n1, a), at(grid.p2_min, grid.p2_max, grid.n2, b));
    }
  }
  return out;
}

}  // namespace cgames::scenarios
