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

#include <utility>
#include <vector>

#include "cgames/game/kkt.hpp"

namespace cgames::game {

/// Sum of local terms making up G and its Jacobian.
///
/// A cost term adds weight * grad f to its owner's stationarity rows. A
/// constraint term owns one MCP row (and multiplier) per output; each
/// participant p adds -coefficient_p * (grad g)^T lambda to its own
/// stationarity rows. Jacobian entries are written through precomputed
/// value slots so assembly never searches the sparse structure.
class KktAssembler {
 public:
  struct Participant {
    int owner = -1;
    double coefficient = 1.0;  // for cost terms: the cost weight
    std::vector<int> owned;    // local input positions owned by `owner`
  };

  struct Term {
    LocalFunctionPtr fn;
    std::vector<Eigen::Index> inputs;
    bool is_cost = true;
    Eigen::Index multiplier_begin = 0;
    std::vector<Participant> participants;
    std::vector<Eigen::Index> slots;
  };

  KktLayout layout;
  std::vector<Term> terms;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<mcp::BlockLabel> labels;
  mcp::SparseMatrix pattern;
  int max_inputs = 1;
  int max_outputs = 1;

  Eigen::Index allocate(Eigen::Index count, VariableKind kind, int owner, int theta);
  void add_cost(LocalFunctionPtr fn, std::vector<Eigen::Index> inputs, int owner, double weight);
  void add_constraint(LocalFunctionPtr fn, std::vector<Eigen::Index> inputs, VariableKind kind,
                      std::vector<std::pair<int, double>> participants, int theta);
  /// Builds the Jacobian pattern and the value slots of every term.
  void finalize();

  void residual(const Eigen::VectorXd& v, Eigen::VectorXd& g) const;
  void jacobian(const Eigen::VectorXd& v, mcp::SparseMatrix& out) const;
  double lagrangian(int owner, const Eigen::VectorXd& v) const;

 private:
  // Emits every structural Jacobian entry of `t` in a fixed order; values
  // are taken from the local Hessian/Jacobian when provided, zero otherwise.
  template <typename Emit>
  void visit(const Term& t, const Eigen::MatrixXd* hess, const Eigen::MatrixXd* jac, Emit&& emit) const;
};

}  // namespace cgames::game
