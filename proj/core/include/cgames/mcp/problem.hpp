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
#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cgames::mcp {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Named contiguous index range of the MCP variable, used in diagnostics.
struct BlockLabel {
  std::string name;
  Eigen::Index begin = 0;
  Eigen::Index end = 0;  // one past the last index
};

/// Box-constrained mixed complementarity problem.
///
/// Find v in [lower, upper] such that for every component j either
///   v_j = lower_j and G_j(v) >= 0,
///   lower_j < v_j < upper_j and G_j(v) = 0, or
///   v_j = upper_j and G_j(v) <= 0.
///
/// The Jacobian callback must return the same sparsity pattern for every v.
/// Instances are immutable and may be shared between threads, provided the
/// callbacks themselves are thread-safe.
class MixedComplementarityProblem {
 public:
  using ResidualFn = std::function<void(const Eigen::VectorXd& v, Eigen::VectorXd& out)>;
  using JacobianFn = std::function<void(const Eigen::VectorXd& v, SparseMatrix& out)>;

  /// Throws std::invalid_argument unless lower_j < upper_j for every j.
  MixedComplementarityProblem(Eigen::VectorXd lower, Eigen::VectorXd upper, ResidualFn residual,
                              JacobianFn jacobian, std::vector<BlockLabel> block_labels = {});

  Eigen::Index dimension() const { return lower_.size(); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const std::vector<BlockLabel>& block_labels() const { return block_labels_; }

  void residual(const Eigen::VectorXd& v, Eigen::VectorXd& out) const;
  Eigen::VectorXd residual(const Eigen::VectorXd& v) const;
  void jacobian(const Eigen::VectorXd& v, SparseMatrix& out) const;
  SparseMatrix jacobian(const Eigen::VectorXd& v) const;

  /// Number of stored entries in the (constant) Jacobian pattern.
  Eigen::Index structural_nonzeros(const Eigen::VectorXd& probe) const;

  Eigen::VectorXd clip(const Eigen::VectorXd& v) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
  ResidualFn residual_;
  JacobianFn jacobian_;
  std::vector<BlockLabel> block_labels_;
};

/// Affine problem G(v) = M v + q over a box.
MixedComplementarityProblem make_affine_mcp(const Eigen::MatrixXd& M, const Eigen::VectorXd& q,
                                            const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

enum class Clause { kAtLower, kInterior, kAtUpper, kViolated };

const char* to_string(Clause clause);

struct ComponentCheck {
  Clause clause = Clause::kViolated;
  double value = 0.0;
  double residual = 0.0;
  /// Distance to the nearest satisfied clause (0 when one holds exactly).
  double violation = 0.0;
};

struct SolutionCheck {
  bool satisfied = false;
  double worst_violation = 0.0;
  Eigen::Index worst_index = -1;
  std::vector<ComponentCheck> components;
};

/// Per-component complementarity check with tolerance `tol` on both bound
/// membership and the sign conditions.
SolutionCheck check_mcp_solution(const MixedComplementarityProblem& problem, const Eigen::VectorXd& v,
                                 double tol);

/// Fischer–Burmeister reformulation; zero exactly at MCP solutions.
///
/// Free components reduce to G, one-sided bounds use a single FB term and
/// two-sided bounds the nested composition phi(v - l, -phi(u - v, -G)).
Eigen::VectorXd fb_residual(const MixedComplementarityProblem& problem, const Eigen::VectorXd& v);
Eigen::VectorXd fb_residual(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                            const Eigen::VectorXd& v, const Eigen::VectorXd& g);

/// Natural (min-map) residual v - mid(lower, upper, v - G).
Eigen::VectorXd natural_residual(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                 const Eigen::VectorXd& v, const Eigen::VectorXd& g);

/// Scalar Fischer–Burmeister function a + b - sqrt(a^2 + b^2).
double fischer_burmeister(double a, double b);

/// Writes v, G(v), block labels and per-block residual norms as JSON.
void write_solution_report(std::ostream& os, const MixedComplementarityProblem& problem,
                           const Eigen::VectorXd& v);

}  // namespace cgames::mcp
