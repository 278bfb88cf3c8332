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

#include "cgames/game/types.hpp"
#include "cgames/scenarios/collision.hpp"
#include "cgames/scenarios/config.hpp"

namespace cgames::scenarios {

/// Road frame: p1 runs along the road, p2 across it (positive to the left).

/// Ego car approaching a pedestrian whose goal curb is uncertain. The ego
/// must pass behind the pedestrian: the obstacle is open towards the goal.
game::ContingencyGame build_jaywalking(const ScenarioConfig& config);

/// Ego car behind a human-driven car and a slow lead car; the human either
/// merges into the left lane or stays. Cars cannot be overtaken on the side
/// of their target lane.
game::ContingencyGame build_overtaking(const ScenarioConfig& config);

/// Dispatches on config.scenario.
game::ContingencyGame build_game(const ScenarioConfig& config);

/// Copy of `config` with the swept agent (pedestrian or human car) moved to
/// position (p1, p2).
ScenarioConfig with_swept_position(const ScenarioConfig& config, double p1, double p2);

/// Grid positions, p1-major, n1 * n2 of them.
std::vector<Eigen::Vector2d> grid_positions(const SweepGrid& grid);

game::LocalFunctionPtr make_car_cost(const CarWeights& w, double target_lane, double reference_velocity);
game::LocalFunctionPtr make_pedestrian_cost(const PedestrianWeights& w, const Eigen::Vector2d& goal);
/// Collision constraint on the stage vectors (x_i, u_i, x_j, u_j).
game::LocalFunctionPtr make_collision(const CollisionGeometry& geometry, double alpha, int stage_dim_i,
                                      int stage_dim_j);

}  // namespace cgames::scenarios
