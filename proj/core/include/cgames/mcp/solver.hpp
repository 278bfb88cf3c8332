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

#include <cstdint>
#include <vector>

#include "cgames/mcp/problem.hpp"

namespace cgames::mcp {

/// Settings of the semismooth Newton solver. None of these values come from
/// an external reference; they are this library's defaults.
struct SolverOptions {
  /// Convergence when both the FB residual and the natural residual are
  /// below this value in the max-norm.
  double residual_tolerance = 1e-8;
  int max_iterations = 200;
  /// Backtracking factor in (0, 1).
  double line_search_contraction = 0.5;
  /// Sufficient-decrease slope in (0, 1).
  double armijo_slope = 1e-4;
  /// Smallest diagonal shift added to the Newton matrix; doubled on failure.
  double regularization_floor = 0.0;
  /// After a failed first attempt, follow the smoothed FB path
  /// phi_eps(a, b) = a + b - sqrt(a^2 + b^2 + 2 eps^2) from eps = smoothing_start
  /// down to zero before the final exact Newton phase.
  bool smoothing_restart = true;
  double smoothing_start = 1.0;
  /// An attempt is abandoned when the merit norm shrinks by less than 1% over
  /// this many accepted iterations (0 disables the check).
  int stall_window = 30;
  /// Additional attempts from randomly perturbed multipliers.
  int restart_attempts = 2;
  std::uint64_t seed = 0;
  bool record_history = false;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

enum class SolveStatus { kConverged, kMaxIterations, kSingularJacobian, kLineSearchFailure };

const char* to_string(SolveStatus status);

struct SolveResult {
  Eigen::VectorXd solution;
  SolveStatus status = SolveStatus::kMaxIterations;
  /// max(|FB residual|_inf, |natural residual|_inf) at `solution`.
  double merit_norm = 0.0;
  int iterations = 0;
  /// Attempts made after the first one (smoothing and perturbed restarts).
  int restarts = 0;
  double wall_time = 0.0;  // seconds
  /// 2-norm of the FB residual at every accepted iterate of the exact Newton
  /// phase of the reported attempt.
  std::vector<double> merit_history;

  bool converged() const { return status == SolveStatus::kConverged; }
};

/// Solves the MCP by semismooth Newton on the Fischer–Burmeister
/// reformulation with Armijo backtracking and diagonal regularization.
/// Steps that Newton cannot make progress on fall back to a
/// Levenberg–Marquardt direction and then to steepest descent.
///
/// `v0` is clipped into the box before iterating.
SolveResult solve_mcp(const MixedComplementarityProblem& problem, const Eigen::VectorXd& v0,
                      const SolverOptions& options = {});

}  // namespace cgames::mcp
