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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cgames/game/kkt.hpp"
#include "cgames/game/types.hpp"
#include "cgames/mcp/solver.hpp"

namespace cgames::game {

struct GameSolveOptions {
  mcp::SolverOptions solver;
  /// Starting value of every inequality multiplier.
  double inequality_start = 1e-2;
  EgoPlan ego_plan = EgoPlan::kPerHypothesis;
  /// Optional multiplier warm start (blocks of the wrong size are ignored).
  std::optional<Multipliers> initial_multipliers;
};

struct EquilibriumSolution {
  TrajectoryProfile profile;
  /// Private multipliers per (theta, player), one multiplier per shared
  /// constraint row per theta, and the contingency multipliers rho.
  Multipliers multipliers;
  /// max(|FB residual|_inf, |natural residual|_inf) of the KKT MCP.
  double kkt_residual = 0.0;
  mcp::SolveResult solver;
  EgoPlan ego_plan = EgoPlan::kPerHypothesis;
  /// Natural-residual max-norm per labelled MCP block.
  std::vector<std::pair<std::string, double>> block_residuals;

  bool converged() const { return solver.converged(); }
};

/// Synthesizes the KKT MCP and solves it from `init` (default: zero-control
/// rollout) with inequality multipliers at `inequality_start`.
EquilibriumSolution solve_contingency_game(const ContingencyGame& game,
                                           const std::optional<TrajectoryProfile>& init = std::nullopt,
                                           const GameSolveOptions& options = {});

/// Solves an already synthesized system from an explicit MCP start point.
EquilibriumSolution solve_kkt_system(const KktSystem& system, const Eigen::VectorXd& v0,
                                     const mcp::SolverOptions& options);

struct EquilibriumReport {
  bool passed = false;
  double tolerance = 0.0;
  /// Stationarity max-norm per (theta, player). With a shared ego plan the
  /// ego entry of theta = 0 holds the whole ego block.
  std::vector<std::vector<double>> stationarity;
  double max_stationarity = 0.0;
  /// Worst violation of inequalities (g >= 0) and equalities (g = 0).
  double primal_infeasibility = 0.0;
  /// Worst |min(lambda, g)| over inequalities, including negative lambda.
  double complementarity = 0.0;
  /// Max-norm of the contingency constraint.
  double contingency_residual = 0.0;

  std::string summary() const;
};

/// First-order check of the equilibrium conditions at the solution's
/// profile and multipliers.
EquilibriumReport verify_equilibrium(const ContingencyGame& game, const EquilibriumSolution& solution, double tol);

/// Per-participant multipliers implied by the ratio scheme for shared
/// constraint `constraint` of hypothesis `theta`; row k holds participant k.
Eigen::MatrixXd recovered_shared_multipliers(const ContingencyGame& game, const EquilibriumSolution& solution,
                                             int theta, int constraint);

/// Values of shared constraint rows per hypothesis, in layout order.
std::vector<Eigen::VectorXd> shared_constraint_values(const ContingencyGame& game, const TrajectoryProfile& profile);

}  // namespace cgames::game
