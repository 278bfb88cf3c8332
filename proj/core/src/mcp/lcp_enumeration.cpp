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

#include "cgames/mcp/lcp_enumeration.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cgames::mcp {

namespace {

constexpr double kClauseTolerance = 1e-10;

bool satisfies(const Eigen::VectorXd& v, const Eigen::VectorXd& g, const Eigen::VectorXd& lower,
               const Eigen::VectorXd& upper) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const bool at_lower = std::abs(v[j] - lower[j]) <= kClauseTolerance && g[j] >= -kClauseTolerance;
    const bool at_upper = std::abs(v[j] - upper[j]) <= kClauseTolerance && g[j] <= kClauseTolerance;
    const bool interior = v[j] >= lower[j] - kClauseTolerance && v[j] <= upper[j] + kClauseTolerance &&
                          std::abs(g[j]) <= kClauseTolerance;
    if (!(at_lower || at_upper || interior)) return false;
  }
  return true;
}

}  // namespace

std::vector<Eigen::VectorXd> solve_lcp_bruteforce(const Eigen::MatrixXd& M, const Eigen::VectorXd& q,
                                                  const Eigen::VectorXd& lower,
                                                  const Eigen::VectorXd& upper) {
  const Eigen::Index d = q.size();
  if (d > kMaxEnumerationDimension) {
    throw std::invalid_argument("solve_lcp_bruteforce: dimension " + std::to_string(d) + " exceeds " +
                                std::to_string(kMaxEnumerationDimension));
  }
  if (M.rows() != d || M.cols() != d || lower.size() != d || upper.size() != d) {
    throw std::invalid_argument("solve_lcp_bruteforce: inconsistent dimensions");
  }

  std::vector<Eigen::VectorXd> solutions;
  std::vector<int> state(static_cast<std::size_t>(d), 0);  // 0 lower, 1 interior, 2 upper
  long long total = 1;
  for (Eigen::Index j = 0; j < d; ++j) total *= 3;

  for (long long code = 0; code < total; ++code) {
    long long rest = code;
    std::vector<Eigen::Index> free_set;
    bool feasible = true;
    Eigen::VectorXd v(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      state[static_cast<std::size_t>(j)] = static_cast<int>(rest % 3);
      rest /= 3;
      const int s = state[static_cast<std::size_t>(j)];
      if (s == 1) {
        free_set.push_back(j);
        v[j] = 0.0;
      } else {
        const double bound = s == 0 ? lower[j] : upper[j];
        if (!std::isfinite(bound)) {
          feasible = false;
          break;
        }
        v[j] = bound;
      }
    }
    if (!feasible) continue;

    const auto k = static_cast<Eigen::Index>(free_set.size());
    if (k > 0) {
      // Solve M_FF v_F = -(q_F + M_FB v_B) on the interior set.
      Eigen::MatrixXd mff(k, k);
      Eigen::VectorXd rhs(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        const Eigen::Index i = free_set[static_cast<std::size_t>(a)];
        rhs[a] = -q[i];
        for (Eigen::Index j = 0; j < d; ++j) {
          if (state[static_cast<std::size_t>(j)] != 1) rhs[a] -= M(i, j) * v[j];
        }
        for (Eigen::Index b = 0; b < k; ++b) mff(a, b) = M(i, free_set[static_cast<std::size_t>(b)]);
      }
      const Eigen::FullPivLU<Eigen::MatrixXd> lu(mff);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd vf = lu.solve(rhs);
      for (Eigen::Index a = 0; a < k; ++a) v[free_set[static_cast<std::size_t>(a)]] = vf[a];
    }

    const Eigen::VectorXd g = M * v + q;
    if (!satisfies(v, g, lower, upper)) continue;
    bool duplicate = false;
    for (const auto& s : solutions) {
      if ((s - v).lpNorm<Eigen::Infinity>() <= 1e-8) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) solutions.push_back(v);
  }
  return solutions;
}

}  // namespace cgames::mcp
