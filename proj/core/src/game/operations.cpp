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

#include "cgames/game/operations.hpp"

#include <span>
#include <stdexcept>
#include <string>

namespace cgames::game {

Eigen::MatrixXd rollout(const PlayerSpec& player, const Eigen::MatrixXd& controls) {
  if (controls.rows() != player.control_dim || controls.cols() < 1) {
    throw std::invalid_argument("rollout: controls must be " + std::to_string(player.control_dim) + " x T");
  }
  if (player.initial_state.size() != player.state_dim) {
    throw std::invalid_argument("rollout: initial state has the wrong dimension");
  }
  const Eigen::Index horizon = controls.cols();
  Eigen::MatrixXd states(player.state_dim, horizon);
  states.col(0) = player.initial_state;
  Eigen::VectorXd stage(player.stage_dim());
  Eigen::VectorXd next(player.state_dim);
  for (Eigen::Index t = 0; t + 1 < horizon; ++t) {
    stage << states.col(t), controls.col(t);
    player.dynamics->evaluate(std::span<const double>(stage.data(), static_cast<std::size_t>(stage.size())),
                              std::span<double>(next.data(), static_cast<std::size_t>(next.size())));
    states.col(t + 1) = next;
  }
  return states;
}

Eigen::VectorXd stage_vector(const PlayerTrajectory& trajectory, int t) {
  Eigen::VectorXd z(trajectory.states.rows() + trajectory.controls.rows());
  z << trajectory.states.col(t - 1), trajectory.controls.col(t - 1);
  return z;
}

double trajectory_cost(const ContingencyGame& game, const TrajectoryProfile& profile, int theta, int player) {
  const PlayerSpec& spec = game.player(theta, player);
  double total = 0.0;
  Eigen::VectorXd input;
  double value = 0.0;
  for (const auto& term : spec.stage_costs) {
    const std::vector<int> parts = term.participants.empty() ? std::vector<int>{player} : term.participants;
    const int last = term.last_stage < 0 ? game.horizon : term.last_stage;
    input.resize(term.fn->input_dim());
    for (int t = term.first_stage; t <= last; ++t) {
      Eigen::Index offset = 0;
      for (int i : parts) {
        const Eigen::VectorXd z = stage_vector(profile.at(theta, i), t);
        input.segment(offset, z.size()) = z;
        offset += z.size();
      }
      term.fn->evaluate(std::span<const double>(input.data(), static_cast<std::size_t>(input.size())),
                        std::span<double>(&value, 1));
      total += value;
    }
  }
  return total;
}

double expected_cost(const ContingencyGame& game, const TrajectoryProfile& profile) {
  double total = 0.0;
  for (int theta = 0; theta < game.num_hypotheses(); ++theta) {
    const double b = game.belief.probabilities[static_cast<std::size_t>(theta)];
    if (b == 0.0) continue;
    total += b * trajectory_cost(game, profile, theta, 0);
  }
  return total;
}

Eigen::VectorXd contingency_constraint(const std::vector<Eigen::MatrixXd>& ego_controls, int branching_time) {
  if (ego_controls.empty()) throw std::invalid_argument("contingency_constraint: no hypotheses");
  const Eigen::Index m = ego_controls.front().rows();
  for (const auto& u : ego_controls) {
    if (u.rows() != m || u.cols() < branching_time) {
      throw std::invalid_argument("contingency_constraint: inconsistent control sequences");
    }
  }
  if (branching_time < 0) throw std::invalid_argument("contingency_constraint: negative branching time");
  const auto k = static_cast<Eigen::Index>(ego_controls.size());
  Eigen::VectorXd c((k - 1) * branching_time * m);
  Eigen::Index row = 0;
  for (Eigen::Index j = 1; j < k; ++j) {
    for (int t = 0; t < branching_time; ++t) {
      c.segment(row, m) = ego_controls[0].col(t) - ego_controls[static_cast<std::size_t>(j)].col(t);
      row += m;
    }
  }
  return c;
}

TrajectoryProfile zero_control_profile(const ContingencyGame& game) {
  TrajectoryProfile profile;
  profile.branches.resize(static_cast<std::size_t>(game.num_hypotheses()));
  for (int theta = 0; theta < game.num_hypotheses(); ++theta) {
    for (int i = 0; i < game.num_players(theta); ++i) {
      const auto& spec = game.player(theta, i);
      PlayerTrajectory traj;
      traj.controls = Eigen::MatrixXd::Zero(spec.control_dim, game.horizon);
      traj.states = rollout(spec, traj.controls);
      profile.branches[static_cast<std::size_t>(theta)].push_back(std::move(traj));
    }
  }
  return profile;
}

}  // namespace cgames::game
