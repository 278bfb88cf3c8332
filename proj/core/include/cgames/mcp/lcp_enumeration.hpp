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

namespace cgames::mcp {

inline constexpr int kMaxEnumerationDimension = 12;

/// All solutions of the box-constrained LCP G(v) = M v + q, found by
/// enumerating every {at lower, interior, at upper} assignment (3^d cases)
/// and solving the induced linear system on the interior set.
///
/// A candidate is kept when it satisfies every complementarity clause to
/// 1e-10; duplicates (degenerate assignments reaching the same point) are
/// merged. Throws std::invalid_argument for d > 12.
std::vector<Eigen::VectorXd> solve_lcp_bruteforce(const Eigen::MatrixXd& M, const Eigen::VectorXd& q,
                                                  const Eigen::VectorXd& lower,
                                                  const Eigen::VectorXd& upper);

}  // namespace cgames::mcp
