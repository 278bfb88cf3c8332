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

#include "cgames/mcp/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace cgames::mcp {

void SolverOptions::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("SolverOptions: " + what); };
  if (!(residual_tolerance > 0.0)) fail("residual_tolerance must be positive");
  if (max_iterations < 1) fail("max_iterations must be at least 1");
  if (!(line_search_contraction > 0.0 && line_search_contraction < 1.0)) {
    fail("line_search_contraction must lie in (0, 1)");
  }
  if (!(armijo_slope > 0.0 && armijo_slope < 1.0)) fail("armijo_slope must lie in (0, 1)");
  if (!(regularization_floor >= 0.0)) fail("regularization_floor must be non-negative");
  if (restart_attempts < 0) fail("restart_attempts must be non-negative");
  if (!(smoothing_start > 0.0)) fail("smoothing_start must be positive");
  if (stall_window < 0) fail("stall_window must be non-negative");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kMaxIterations:
      return "max_iterations";
    case SolveStatus::kSingularJacobian:
      return "singular_jacobian";
    case SolveStatus::kLineSearchFailure:
      return "line_search_failure";
  }
  return "unknown";
}

namespace {

constexpr double kSmallestStep = 1e-12;
constexpr double kRegularizationSeed = 1e-8;
constexpr double kRegularizationCeiling = 1e8;
// Newton directions with slope above -kDescentSlack * |d|^2.1 are rejected.
constexpr double kDescentSlack = 1e-10;
constexpr double kShortestNewtonStep = 1e-3;
constexpr double kMarquardtScale = 1e-2;
constexpr double kStallRatio = 0.99;
constexpr double kPathCloseness = 1.0;
constexpr double kSmoothingDecrease = 0.2;
constexpr double kSmoothingEnd = 1e-6;

enum class BoundKind { kFree, kLower, kUpper, kBox };

// Partial derivatives of the scalar FB function; the kink at the origin uses
// the symmetric element of the generalized gradient.
struct FbPartials {
  double da;
  double db;
};

// Smoothed FB value a + b - sqrt(a^2 + b^2 + c) with c = 2 eps^2.
double smoothed_fb(double a, double b, double c) { return c == 0.0 ? fischer_burmeister(a, b) : a + b - std::sqrt(a * a + b * b + c); }

FbPartials fb_partials(double a, double b, double c) {
  const double r = c == 0.0 ? std::hypot(a, b) : std::sqrt(a * a + b * b + c);
  if (r < 1e-14) {
    constexpr double kKink = 1.0 - 0.70710678118654752440;
    return {kKink, kKink};
  }
  return {1.0 - a / r, 1.0 - b / r};
}

class NewtonWorkspace {
 public:
  NewtonWorkspace(const MixedComplementarityProblem& problem, const SolverOptions& options)
      : problem_(problem), options_(options), n_(problem.dimension()) {
    kinds_.resize(static_cast<std::size_t>(n_));
    da_.resize(n_);
    db_.resize(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      const bool lo = std::isfinite(problem.lower()[j]);
      const bool up = std::isfinite(problem.upper()[j]);
      kinds_[static_cast<std::size_t>(j)] =
          lo && up ? BoundKind::kBox : lo ? BoundKind::kLower : up ? BoundKind::kUpper : BoundKind::kFree;
    }
  }

  struct Outcome {
    Eigen::VectorXd v;
    SolveStatus status = SolveStatus::kMaxIterations;
    double merit_norm = std::numeric_limits<double>::infinity();
    int iterations = 0;
    std::vector<double> history;
  };

  // Exact FB Newton phase from v.
  Outcome run(Eigen::VectorXd v, int budget) {
    smoothing_ = 0.0;
    Outcome out;
    State st;
    st.v = std::move(v);
    evaluate(st);
    if (options_.record_history) out.history.push_back(std::sqrt(2.0 * st.psi));
    std::vector<double> norms{std::sqrt(2.0 * st.psi)};

    for (int k = 0;; ++k) {
      out.merit_norm = convergence_measure(st.v, st.g, st.phi);
      out.iterations = k;
      if (out.merit_norm <= options_.residual_tolerance) {
        out.status = SolveStatus::kConverged;
        break;
      }
      if (!std::isfinite(out.merit_norm)) {
        out.status = SolveStatus::kLineSearchFailure;
        break;
      }
      if (k >= budget) {
        out.status = SolveStatus::kMaxIterations;
        break;
      }
      const StepResult r = step(st);
      if (r != StepResult::kAccepted) {
        out.merit_norm = convergence_measure(st.v, st.g, st.phi);
        out.iterations = k + 1;
        out.status = r == StepResult::kSingular ? SolveStatus::kSingularJacobian : SolveStatus::kLineSearchFailure;
        break;
      }
      const double norm = std::sqrt(2.0 * st.psi);
      if (options_.record_history) out.history.push_back(norm);
      norms.push_back(norm);
      const auto w = static_cast<std::size_t>(options_.stall_window);
      if (w > 0 && norms.size() > w && norm > kStallRatio * norms[norms.size() - 1 - w]) {
        out.merit_norm = convergence_measure(st.v, st.g, st.phi);
        out.iterations = k + 1;
        out.status = SolveStatus::kLineSearchFailure;
        break;
      }
    }
    out.v = std::move(st.v);
    return out;
  }

  // Follows the smoothed reformulation from eps = smoothing_start towards
  // zero. Returns the last iterate and the number of iterations used.
  std::pair<Eigen::VectorXd, int> follow_smoothing_path(Eigen::VectorXd v, int budget) {
    double eps = options_.smoothing_start;
    State st;
    st.v = std::move(v);
    int used = 0;
    while (used < budget) {
      smoothing_ = 2.0 * eps * eps;
      evaluate(st);
      // Newton on the smoothed system until it is close to its root.
      while (used < budget && st.phi.lpNorm<Eigen::Infinity>() > kPathCloseness * eps) {
        ++used;
        if (step(st) != StepResult::kAccepted) break;
      }
      if (eps <= kSmoothingEnd) break;
      eps *= kSmoothingDecrease;
    }
    smoothing_ = 0.0;
    return {std::move(st.v), used};
  }

 private:
  struct State {
    Eigen::VectorXd v;
    Eigen::VectorXd g;
    Eigen::VectorXd phi;
    double psi = 0.0;
  };

  enum class StepResult { kAccepted, kSingular, kNoDecrease };

  void evaluate(State& st) {
    problem_.residual(st.v, st.g);
    reformulate(st.v, st.g, st.phi);
    st.psi = 0.5 * st.phi.squaredNorm();
  }

  void reformulate(const Eigen::VectorXd& v, const Eigen::VectorXd& g, Eigen::VectorXd& phi) const {
    if (smoothing_ == 0.0) {
      phi = fb_residual(problem_.lower(), problem_.upper(), v, g);
      return;
    }
    const auto& lo = problem_.lower();
    const auto& up = problem_.upper();
    const double c = smoothing_;
    phi.resize(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      switch (kinds_[static_cast<std::size_t>(j)]) {
        case BoundKind::kFree:
          phi[j] = g[j];
          break;
        case BoundKind::kLower:
          phi[j] = smoothed_fb(v[j] - lo[j], g[j], c);
          break;
        case BoundKind::kUpper:
          phi[j] = -smoothed_fb(up[j] - v[j], -g[j], c);
          break;
        case BoundKind::kBox:
          phi[j] = smoothed_fb(v[j] - lo[j], -smoothed_fb(up[j] - v[j], -g[j], c), c);
          break;
      }
    }
  }

  // One globalized step on the current reformulation. The direction
  // sequence is Newton (long steps only), Levenberg-Marquardt on the
  // least-squares merit, then steepest descent.
  StepResult step(State& st) {
    problem_.jacobian(st.v, jac_);
    if (!pattern_ready_) prepare_pattern();
    generalized_derivative(st.v, st.g, da_, db_);
    assemble(da_, db_);
    const Eigen::VectorXd grad = newton_.transpose() * st.phi;

    Eigen::VectorXd direction;
    if (!solve_direction(st.phi, direction)) return StepResult::kSingular;
    double slope = grad.dot(direction);
    const double dnorm = direction.norm();
    const bool newton_descent = std::isfinite(slope) && slope <= -kDescentSlack * std::pow(dnorm, 2.1);

    for (int pass = 0; pass < 3; ++pass) {
      double shortest = kSmallestStep;
      if (pass == 0) {
        if (!newton_descent) continue;
        shortest = kShortestNewtonStep;
      } else if (pass == 1) {
        if (!levenberg_marquardt_direction(grad, std::sqrt(2.0 * st.psi), direction)) continue;
        slope = grad.dot(direction);
        if (!(slope < 0.0)) continue;
      } else {
        direction = -grad;
        slope = -grad.squaredNorm();
      }
      for (double t = 1.0; t >= shortest; t *= options_.line_search_contraction) {
        trial_.v = st.v + t * direction;
        evaluate(trial_);
        if (std::isfinite(trial_.psi) && trial_.psi <= st.psi + options_.armijo_slope * t * slope) {
          std::swap(st, trial_);
          return StepResult::kAccepted;
        }
      }
    }
    return StepResult::kNoDecrease;
  }

  double convergence_measure(const Eigen::VectorXd& v, const Eigen::VectorXd& g, const Eigen::VectorXd& phi) const {
    if (n_ == 0) return 0.0;
    const double fb = phi.lpNorm<Eigen::Infinity>();
    const double nat = natural_residual(problem_.lower(), problem_.upper(), v, g).lpNorm<Eigen::Infinity>();
    if (std::isnan(fb) || std::isnan(nat)) return std::numeric_limits<double>::infinity();
    return std::max(fb, nat);
  }

  // Diagonal factors of an element of the generalized Jacobian of the FB
  // reformulation: dPhi = diag(da) dv + diag(db) dG.
  void generalized_derivative(const Eigen::VectorXd& v, const Eigen::VectorXd& g, Eigen::VectorXd& da,
                              Eigen::VectorXd& db) const {
    const auto& lo = problem_.lower();
    const auto& up = problem_.upper();
    for (Eigen::Index j = 0; j < n_; ++j) {
      switch (kinds_[static_cast<std::size_t>(j)]) {
        case BoundKind::kFree:
          da[j] = 0.0;
          db[j] = 1.0;
          break;
        case BoundKind::kLower: {
          const auto p = fb_partials(v[j] - lo[j], g[j], smoothing_);
          da[j] = p.da;
          db[j] = p.db;
          break;
        }
        case BoundKind::kUpper: {
          const auto p = fb_partials(up[j] - v[j], -g[j], smoothing_);
          da[j] = p.da;
          db[j] = p.db;
          break;
        }
        case BoundKind::kBox: {
          const double inner = smoothed_fb(up[j] - v[j], -g[j], smoothing_);
          const auto pi = fb_partials(up[j] - v[j], -g[j], smoothing_);
          const auto po = fb_partials(v[j] - lo[j], -inner, smoothing_);
          da[j] = po.da + po.db * pi.da;
          db[j] = po.db * pi.db;
          break;
        }
      }
    }
  }

  // Newton matrix pattern = Jacobian pattern plus the full diagonal.
  void prepare_pattern() {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(jac_.nonZeros() + n_));
    for (Eigen::Index c = 0; c < jac_.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(jac_, c); it; ++it) entries.emplace_back(it.row(), it.col(), 0.0);
    }
    for (Eigen::Index j = 0; j < n_; ++j) entries.emplace_back(j, j, 0.0);
    newton_.resize(n_, n_);
    newton_.setFromTriplets(entries.begin(), entries.end());
    newton_.makeCompressed();

    diagonal_slot_.assign(static_cast<std::size_t>(n_), -1);
    jac_slot_.assign(static_cast<std::size_t>(jac_.nonZeros()), -1);
    Eigen::Index jk = 0;
    for (Eigen::Index c = 0; c < n_; ++c) {
      Eigen::Index hk = newton_.outerIndexPtr()[c];
      const Eigen::Index hend = newton_.outerIndexPtr()[c + 1];
      for (SparseMatrix::InnerIterator it(jac_, c); it; ++it) {
        while (hk < hend && newton_.innerIndexPtr()[hk] < it.row()) ++hk;
        jac_slot_[static_cast<std::size_t>(jk++)] = hk;
      }
      for (Eigen::Index hk2 = newton_.outerIndexPtr()[c]; hk2 < hend; ++hk2) {
        if (newton_.innerIndexPtr()[hk2] == c) diagonal_slot_[static_cast<std::size_t>(c)] = hk2;
      }
    }
    lu_.analyzePattern(newton_);
    pattern_ready_ = true;
    pattern_nonzeros_ = jac_.nonZeros();
  }

  void assemble(const Eigen::VectorXd& da, const Eigen::VectorXd& db) {
    if (jac_.nonZeros() != pattern_nonzeros_ || !jac_.isCompressed()) {
      jac_.makeCompressed();
      if (jac_.nonZeros() != pattern_nonzeros_) {
        throw std::logic_error("MCP Jacobian pattern changed between evaluations");
      }
    }
    double* values = newton_.valuePtr();
    std::fill(values, values + newton_.nonZeros(), 0.0);
    Eigen::Index jk = 0;
    for (Eigen::Index c = 0; c < n_; ++c) {
      for (SparseMatrix::InnerIterator it(jac_, c); it; ++it) {
        values[jac_slot_[static_cast<std::size_t>(jk++)]] = db[it.row()] * it.value();
      }
    }
    for (Eigen::Index j = 0; j < n_; ++j) values[diagonal_slot_[static_cast<std::size_t>(j)]] += da[j];
  }

  bool solve_direction(const Eigen::VectorXd& phi, Eigen::VectorXd& direction) {
    const Eigen::VectorXd rhs = -phi;
    double mu = options_.regularization_floor;
    Eigen::VectorXd base_diagonal(n_);
    for (Eigen::Index j = 0; j < n_; ++j) base_diagonal[j] = newton_.valuePtr()[diagonal_slot_[static_cast<std::size_t>(j)]];
    while (mu <= kRegularizationCeiling) {
      for (Eigen::Index j = 0; j < n_; ++j) {
        newton_.valuePtr()[diagonal_slot_[static_cast<std::size_t>(j)]] = base_diagonal[j] + mu;
      }
      lu_.factorize(newton_);
      if (lu_.info() == Eigen::Success) {
        direction = lu_.solve(rhs);
        if (direction.allFinite()) {
          const double residual = (newton_ * direction - rhs).norm();
          if (residual <= 1e-6 * (1.0 + rhs.norm())) {
            restore_diagonal(base_diagonal);
            return true;
          }
        }
      }
      mu = std::max(2.0 * mu, kRegularizationSeed);
    }
    restore_diagonal(base_diagonal);
    return false;
  }

  // Solves (H^T H + mu I) d = -H^T phi with mu proportional to |phi|.
  bool levenberg_marquardt_direction(const Eigen::VectorXd& grad, double phi_norm, Eigen::VectorXd& direction) {
    SparseMatrix normal = SparseMatrix(newton_.transpose()) * newton_;
    double mu = std::max(kMarquardtScale * phi_norm, kRegularizationSeed);
    for (; mu <= kRegularizationCeiling; mu *= 10.0) {
      SparseMatrix shifted = normal;
      for (Eigen::Index j = 0; j < n_; ++j) shifted.coeffRef(j, j) += mu;
      ldlt_.compute(shifted);
      if (ldlt_.info() != Eigen::Success) continue;
      direction = ldlt_.solve(-grad);
      if (direction.allFinite()) return true;
    }
    return false;
  }

  void restore_diagonal(const Eigen::VectorXd& base_diagonal) {
    for (Eigen::Index j = 0; j < n_; ++j) {
      newton_.valuePtr()[diagonal_slot_[static_cast<std::size_t>(j)]] = base_diagonal[j];
    }
  }

  const MixedComplementarityProblem& problem_;
  const SolverOptions& options_;
  Eigen::Index n_;
  std::vector<BoundKind> kinds_;
  SparseMatrix jac_;
  SparseMatrix newton_;
  std::vector<Eigen::Index> jac_slot_;
  std::vector<Eigen::Index> diagonal_slot_;
  Eigen::Index pattern_nonzeros_ = 0;
  bool pattern_ready_ = false;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  Eigen::VectorXd da_;
  Eigen::VectorXd db_;
  State trial_;
  double smoothing_ = 0.0;
};

}  // namespace

SolveResult solve_mcp(const MixedComplementarityProblem& problem, const Eigen::VectorXd& v0,
                      const SolverOptions& options) {
  options.validate();
  if (v0.size() != problem.dimension()) {
    throw std::invalid_argument("solve_mcp: initial point has dimension " + std::to_string(v0.size()) +
                                ", expected " + std::to_string(problem.dimension()));
  }
  const auto start = std::chrono::steady_clock::now();
  const Eigen::VectorXd origin = problem.clip(v0);
  NewtonWorkspace workspace(problem, options);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SolveResult best;
  best.merit_norm = std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  const int smoothing_attempts = options.smoothing_restart ? 1 : 0;
  const int attempts = 1 + smoothing_attempts + options.restart_attempts;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Eigen::VectorXd v = origin;
    int budget = options.max_iterations;
    if (attempt > 0 && attempt <= smoothing_attempts) {
      auto [path_end, used] = workspace.follow_smoothing_path(std::move(v), options.max_iterations);
      v = problem.clip(path_end);
      total_iterations += used;
      budget = std::max(options.max_iterations - used, options.max_iterations / 4);
    } else if (attempt > smoothing_attempts) {
      // Perturb bounded components (multipliers in game problems).
      const double scale = 0.1 * (attempt - smoothing_attempts);
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (std::isfinite(problem.lower()[j]) || std::isfinite(problem.upper()[j])) {
          v[j] += scale * unit(rng);
        }
      }
      v = problem.clip(v);
    }
    auto outcome = workspace.run(std::move(v), budget);
    total_iterations += outcome.iterations;
    const bool better = outcome.status == SolveStatus::kConverged || outcome.merit_norm < best.merit_norm ||
                        attempt == 0;
    if (better) {
      best.solution = std::move(outcome.v);
      best.status = outcome.status;
      best.merit_norm = outcome.merit_norm;
      best.merit_history = std::move(outcome.history);
      best.restarts = attempt;
    }
    if (best.status == SolveStatus::kConverged) break;
  }
  best.iterations = total_iterations;
  best.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return best;
}

}  // namespace cgames::mcp
