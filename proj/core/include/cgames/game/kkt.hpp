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

#include "cgames/game/types.hpp"
#include "cgames/mcp/problem.hpp"

namespace cgames::game {

/// How the ego plan is represented.
enum class EgoPlan {
  /// One ego trajectory per hypothesis, tied by the contingency constraint.
  kPerHypothesis,
  /// A single ego trajectory used under every hypothesis (no branching).
  kShared,
};

struct IndexRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
  Eigen::Index size() const { return end - begin; }
};

enum class VariableKind { kPrimal, kEqualityMultiplier, kInequalityMultiplier, kContingencyMultiplier };

/// Where every quantity lives in the MCP variable.
///
/// Per hypothesis the block order is: primal trajectories of all players,
/// private multipliers of all players, shared-constraint multipliers. The
/// contingency multipliers rho follow the last hypothesis. A primal block
/// stores stage vectors (x_t, u_t) for t = 1..T back to back.
struct KktLayout {
  Eigen::Index dimension = 0;
  int horizon = 0;
  EgoPlan ego_plan = EgoPlan::kPerHypothesis;
  std::vector<std::vector<IndexRange>> primal;               // [theta][player]
  std::vector<std::vector<int>> stage_dims;                  // [theta][player]
  std::vector<std::vector<int>> state_dims;                  // [theta][player]
  std::vector<std::vector<IndexRange>> private_multipliers;  // [theta][player]
  std::vector<IndexRange> shared_multipliers;                 // [theta]
  /// Multiplier range of every shared constraint, [theta][constraint].
  std::vector<std::vector<IndexRange>> shared_constraint_multipliers;
  IndexRange rho;
  std::vector<std::vector<int>> player_id;  // [theta][player]; the ego is 0 everywhere
  int num_player_ids = 0;
  std::vector<VariableKind> kind;           // per MCP component
  std::vector<int> owner;                   // per primal component, -1 elsewhere
  std::vector<int> hypothesis;              // per component, -1 for rho

  /// First index of the stage vector (x_t, u_t), 1-based t.
  Eigen::Index stage_begin(int theta, int player, int t) const;
  /// True when (theta, player) owns its variables; false for the duplicate
  /// ego entries of the shared-plan formulation.
  bool owns_block(int theta, int player) const;
};

struct Multipliers {
  std::vector<std::vector<Eigen::VectorXd>> player;  // [theta][player], private multipliers
  std::vector<Eigen::VectorXd> shared;               // [theta]
  Eigen::VectorXd rho;
};

class KktAssembler;

/// The MCP synthesized from a game's joint KKT conditions, with the maps
/// needed to move between profiles, multipliers and MCP vectors.
class KktSystem {
 public:
  KktSystem(std::shared_ptr<const KktAssembler> assembler, std::shared_ptr<const mcp::MixedComplementarityProblem> problem);

  const mcp::MixedComplementarityProblem& problem() const { return *problem_; }
  std::shared_ptr<const mcp::MixedComplementarityProblem> problem_ptr() const { return problem_; }
  const KktLayout& layout() const;
  Eigen::Index dimension() const { return problem_->dimension(); }
  Eigen::Index structural_nonzeros() const;

  /// Naive starting point: primal from `profile`, inequality multipliers at
  /// `inequality_start`, all other multipliers at zero.
  Eigen::VectorXd initial_point(const TrajectoryProfile& profile, double inequality_start = 1e-2) const;
  Eigen::VectorXd pack(const TrajectoryProfile& profile, const Multipliers& multipliers) const;
  TrajectoryProfile unpack_profile(const Eigen::VectorXd& v) const;
  Multipliers unpack_multipliers(const Eigen::VectorXd& v) const;

  /// Lagrangian of player `player_id` (see KktLayout::player_id) at v; its
  /// gradient with respect to the player's primal variables is the
  /// stationarity block of G.
  double lagrangian(int player_id, const Eigen::VectorXd& v) const;
  std::vector<Eigen::Index> primal_indices(int player_id) const;

 private:
  std::shared_ptr<const KktAssembler> assembler_;
  std::shared_ptr<const mcp::MixedComplementarityProblem> problem_;
};

/// Synthesizes the joint KKT conditions of all players as an MCP.
///
/// Dynamics (including x_1 = initial state) enter as equality constraints
/// with free multipliers. Each shared constraint has a single nonnegative
/// multiplier lambda; participant k sees k's ratio times lambda. The ego
/// problem is written per unit of probability, i.e.
///   L^A = sum_theta b(theta) (J^A_theta - lambda_theta^T g_theta)
///         - mu^T h + rho^T c,
/// with mu the private multipliers of the ego constraints h,
/// so an ego branch with b(theta) = 0 leaves shared constraints to the
/// other participants. Throws std::invalid_argument on invalid games.
KktSystem build_kkt_mcp(const ContingencyGame& game, EgoPlan ego_plan = EgoPlan::kPerHypothesis);

}  // namespace cgames::game
