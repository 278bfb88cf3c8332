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

#include <memory>
#include <string>
#include <vector>

#include "cgames/autodiff/local_function.hpp"

namespace cgames::game {

using LocalFunctionPtr = std::shared_ptr<const autodiff::LocalFunction>;

/// A function of the stage variables (x_t, u_t) of one or more players.
///
/// The input of `fn` is the concatenation of the stage vectors of
/// `participants`, in order. Participants are hypothesis-local player
/// indices (0 is the ego player); an empty list means "the owning player".
/// Stages are 1-based and inclusive; `last_stage = -1` means the horizon.
struct StageTerm {
  LocalFunctionPtr fn;
  std::vector<int> participants;
  int first_stage = 1;
  int last_stage = -1;
};

struct PlayerSpec {
  std::string name;
  int state_dim = 0;
  int control_dim = 0;
  /// x_{t+1} = f(x_t, u_t), as a local function of (x_t, u_t).
  LocalFunctionPtr dynamics;
  Eigen::VectorXd initial_state;
  /// Scalar stage costs, summed over their stages.
  std::vector<StageTerm> stage_costs;
  /// Vector inequalities h(.) >= 0.
  std::vector<StageTerm> private_constraints;
  /// Box bounds (infinite entries are unbounded). State bounds apply from
  /// stage 2 on since x_1 is fixed; control bounds apply at every stage.
  Eigen::VectorXd state_lower;
  Eigen::VectorXd state_upper;
  Eigen::VectorXd control_lower;
  Eigen::VectorXd control_upper;

  int stage_dim() const { return state_dim + control_dim; }
  void validate() const;
};

/// Inequality g(.) >= 0 appearing in the problems of all participants.
///
/// The participants' multipliers are tied by fixed ratios: player k carries
/// multiplier (multiplier_ratio[k] / multiplier_ratio[0]) * lambda, where
/// lambda is the single MCP variable of the constraint.
struct SharedConstraintSpec {
  std::string name;
  LocalFunctionPtr fn;
  std::vector<int> participants;
  std::vector<double> multiplier_ratio;
  int first_stage = 2;
  int last_stage = -1;

  void validate() const;
};

struct Belief {
  std::vector<std::string> hypotheses;
  std::vector<double> probabilities;

  int size() const { return static_cast<int>(hypotheses.size()); }
  int index_of(const std::string& label) const;  // -1 when absent
  void validate() const;

  static Belief uniform(std::vector<std::string> labels);
  static Belief certain(std::vector<std::string> labels, int index);
};

/// Ego player A with one plan per hypothesis and, per hypothesis, the other
/// players B_theta together with the constraints shared with them.
struct ContingencyGame {
  PlayerSpec ego;
  std::vector<std::vector<PlayerSpec>> others;                   // [theta][k]
  std::vector<std::vector<SharedConstraintSpec>> shared_constraints;  // [theta]
  Belief belief;
  int branching_time = 0;
  int horizon = 25;
  double timestep = 0.2;

  int num_hypotheses() const { return belief.size(); }
  /// Players of hypothesis theta, ego included.
  int num_players(int theta) const { return 1 + static_cast<int>(others.at(static_cast<std::size_t>(theta)).size()); }
  const PlayerSpec& player(int theta, int index) const;

  void validate() const;

  ContingencyGame with_branching_time(int t_b) const;
  ContingencyGame with_belief(std::vector<double> probabilities) const;
  /// Single-hypothesis game keeping only `theta`, with belief 1.
  ContingencyGame single_hypothesis(int theta) const;
};

/// States and controls of one player; column t holds time step t + 1.
struct PlayerTrajectory {
  Eigen::MatrixXd states;
  Eigen::MatrixXd controls;
};

struct TrajectoryProfile {
  std::vector<std::vector<PlayerTrajectory>> branches;  // [theta][player]

  const PlayerTrajectory& at(int theta, int player) const {
    return branches.at(static_cast<std::size_t>(theta)).at(static_cast<std::size_t>(player));
  }
  PlayerTrajectory& at(int theta, int player) {
    return branches.at(static_cast<std::size_t>(theta)).at(static_cast<std::size_t>(player));
  }
};

}  // namespace cgames::game
