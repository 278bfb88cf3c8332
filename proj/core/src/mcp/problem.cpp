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

#include "cgames/mcp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace cgames::mcp {

MixedComplementarityProblem::MixedComplementarityProblem(Eigen::VectorXd lower, Eigen::VectorXd upper,
                                                         ResidualFn residual, JacobianFn jacobian,
                                                         std::vector<BlockLabel> block_labels)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      residual_(std::move(residual)),
      jacobian_(std::move(jacobian)),
      block_labels_(std::move(block_labels)) {
  if (lower_.size() == 0 || lower_.size() != upper_.size()) {
    throw std::invalid_argument("MCP bounds must be non-empty vectors of equal length");
  }
  for (Eigen::Index j = 0; j < lower_.size(); ++j) {
    if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || !(lower_[j] < upper_[j])) {
      throw std::invalid_argument("MCP bounds must satisfy lower < upper (component " + std::to_string(j) +
                                  "); substitute fixed variables instead");
    }
  }
  if (!residual_ || !jacobian_) throw std::invalid_argument("MCP residual and Jacobian are required");
  for (const auto& label : block_labels_) {
    if (label.begin < 0 || label.end > lower_.size() || label.begin > label.end) {
      throw std::invalid_argument("MCP block label '" + label.name + "' is out of range");
    }
  }
}

void MixedComplementarityProblem::residual(const Eigen::VectorXd& v, Eigen::VectorXd& out) const {
  out.resize(dimension());
  residual_(v, out);
}

Eigen::VectorXd MixedComplementarityProblem::residual(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(dimension());
  residual_(v, out);
  return out;
}

void MixedComplementarityProblem::jacobian(const Eigen::VectorXd& v, SparseMatrix& out) const {
  jacobian_(v, out);
}

SparseMatrix MixedComplementarityProblem::jacobian(const Eigen::VectorXd& v) const {
  SparseMatrix out;
  jacobian_(v, out);
  return out;
}

Eigen::Index MixedComplementarityProblem::structural_nonzeros(const Eigen::VectorXd& probe) const {
  return jacobian(probe).nonZeros();
}

Eigen::VectorXd MixedComplementarityProblem::clip(const Eigen::VectorXd& v) const {
  return v.cwiseMax(lower_).cwiseMin(upper_);
}

MixedComplementarityProblem make_affine_mcp(const Eigen::MatrixXd& M, const Eigen::VectorXd& q,
                                            const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  if (M.rows() != M.cols() || M.rows() != q.size()) {
    throw std::invalid_argument("affine MCP requires square M matching q");
  }
  SparseMatrix sparse = M.sparseView();
  // Keep the diagonal structurally present even where M has zeros.
  for (Eigen::Index j = 0; j < M.rows(); ++j) sparse.coeffRef(j, j) += 0.0;
  sparse.makeCompressed();
  return MixedComplementarityProblem(
      lower, upper, [M, q](const Eigen::VectorXd& v, Eigen::VectorXd& out) { out = M * v + q; },
      [sparse](const Eigen::VectorXd&, SparseMatrix& out) { out = sparse; });
}

const char* to_string(Clause clause) {
  switch (clause) {
    case Clause::kAtLower:
      return "at_lower";
    case Clause::kInterior:
      return "interior";
    case Clause::kAtUpper:
      return "at_upper";
    case Clause::kViolated:
      return "violated";
  }
  return "unknown";
}

SolutionCheck check_mcp_solution(const MixedComplementarityProblem& problem, const Eigen::VectorXd& v,
                                 double tol) {
  SolutionCheck report;
  report.satisfied = true;
  const Eigen::VectorXd g = problem.residual(v);
  const auto& lo = problem.lower();
  const auto& up = problem.upper();
  report.components.resize(static_cast<std::size_t>(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    ComponentCheck c;
    c.value = v[j];
    c.residual = g[j];
    // Distance to each clause; the smallest decides the classification.
    const double inf = std::numeric_limits<double>::infinity();
    const double to_lower =
        std::isfinite(lo[j]) ? std::max(std::abs(v[j] - lo[j]), std::max(0.0, -g[j])) : inf;
    const double to_upper =
        std::isfinite(up[j]) ? std::max(std::abs(v[j] - up[j]), std::max(0.0, g[j])) : inf;
    const double outside = std::max({0.0, lo[j] - v[j], v[j] - up[j]});
    const double to_interior = std::max(std::abs(g[j]), outside);
    c.violation = std::min({to_lower, to_upper, to_interior});
    if (c.violation > tol || std::isnan(c.violation)) {
      c.clause = Clause::kViolated;
    } else if (to_lower <= tol && to_lower <= to_interior) {
      c.clause = Clause::kAtLower;
    } else if (to_upper <= tol && to_upper <= to_interior) {
      c.clause = Clause::kAtUpper;
    } else {
      c.clause = Clause::kInterior;
    }
    if (c.clause == Clause::kViolated) report.satisfied = false;
    if (!(c.violation <= report.worst_violation)) {
      report.worst_violation = c.violation;
      report.worst_index = j;
    }
    report.components[static_cast<std::size_t>(j)] = c;
  }
  return report;
}

double fischer_burmeister(double a, double b) { return a + b - std::hypot(a, b); }

Eigen::VectorXd fb_residual(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                            const Eigen::VectorXd& v, const Eigen::VectorXd& g) {
  Eigen::VectorXd phi(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const bool has_lo = std::isfinite(lower[j]);
    const bool has_up = std::isfinite(upper[j]);
    if (!has_lo && !has_up) {
      phi[j] = g[j];
    } else if (has_lo && !has_up) {
      phi[j] = fischer_burmeister(v[j] - lower[j], g[j]);
    } else if (!has_lo) {
      phi[j] = -fischer_burmeister(upper[j] - v[j], -g[j]);
    } else {
      phi[j] = fischer_burmeister(v[j] - lower[j], -fischer_burmeister(upper[j] - v[j], -g[j]));
    }
  }
  return phi;
}

Eigen::VectorXd fb_residual(const MixedComplementarityProblem& problem, const Eigen::VectorXd& v) {
  return fb_residual(problem.lower(), problem.upper(), v, problem.residual(v));
}

Eigen::VectorXd natural_residual(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                 const Eigen::VectorXd& v, const Eigen::VectorXd& g) {
  return v - (v - g).cwiseMax(lower).cwiseMin(upper);
}

void write_solution_report(std::ostream& os, const MixedComplementarityProblem& problem,
                           const Eigen::VectorXd& v) {
  const Eigen::VectorXd g = problem.residual(v);
  const Eigen::VectorXd nat = natural_residual(problem.lower(), problem.upper(), v, g);
  nlohmann::json j;
  j["dimension"] = problem.dimension();
  j["solution"] = std::vector<double>(v.data(), v.data() + v.size());
  j["residual"] = std::vector<double>(g.data(), g.data() + g.size());
  j["natural_residual_norm"] = nat.size() > 0 ? nat.lpNorm<Eigen::Infinity>() : 0.0;
  auto& blocks = j["blocks"];
  blocks = nlohmann::json::array();
  for (const auto& label : problem.block_labels()) {
    const auto len = label.end - label.begin;
    const double norm = len > 0 ? nat.segment(label.begin, len).lpNorm<Eigen::Infinity>() : 0.0;
    blocks.push_back({{"name", label.name}, {"begin", label.begin}, {"end", label.end},
                      {"natural_residual_norm", norm}});
  }
  os << j.dump(2) << '\n';
}

}  // namespace cgames::mcp
