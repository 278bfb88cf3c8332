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

#include <vector>

#include "cgames/game/types.hpp"

namespace cgames::game {

/// States x_1..x_T (columns) from x_1 = initial state and the player's step
/// map applied to `controls` (control_dim x T). The last control does not
/// influence the returned states.
Eigen::MatrixXd rollout(const PlayerSpec& player, const Eigen::MatrixXd& controls);

/// Sum over stages of the player's stage costs on hypothesis `theta`.
double trajectory_cost(const ContingencyGame& game, const TrajectoryProfile& profile, int theta, int player);

/// Belief-weighted ego cost: sum_theta b(theta) * J^A(theta).
double expected_cost(const ContingencyGame& game, const TrajectoryProfile& profile);

/// Stacked u_{theta_1,t} - u_{theta_k,t} for k = 2..K and t = 1..t_b, ordered
/// by k, then t. Each matrix is control_dim x T.
Eigen::VectorXd contingency_constraint(const std::vector<Eigen::MatrixXd>& ego_controls, int branching_time);

/// Zero-control rollout of every player in every hypothesis.
TrajectoryProfile zero_control_profile(const ContingencyGame& game);

/// Stage vector (x_t, u_t) for 1-based t.
Eigen::VectorXd stage_vector(const PlayerTrajectory& trajectory, int t);

}  // namespace cgames::game
