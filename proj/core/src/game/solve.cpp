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

#include "cgames/game/solve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <span>

#include "cgames/game/operations.hpp"

namespace cgames::game {

EquilibriumSolution solve_kkt_system(const KktSystem& system, const Eigen::VectorXd& v0,
                                     const mcp::SolverOptions& options) {
  EquilibriumSolution sol;
  sol.ego_plan = system.layout().ego_plan;
  sol.solver = mcp::solve_mcp(system.problem(), v0, options);
  sol.kkt_residual = sol.solver.merit_norm;
  sol.profile = system.unpack_profile(sol.solver.solution);
  sol.multipliers = system.unpack_multipliers(sol.solver.solution);
  const auto& problem = system.problem();
  const Eigen::VectorXd g = problem.residual(sol.solver.solution);
  const Eigen::VectorXd nat = mcp::natural_residual(problem.lower(), problem.upper(), sol.solver.solution, g);
  for (const auto& label : problem.block_labels()) {
    const double norm = label.end > label.begin ? nat.segment(label.begin, label.end - label.begin).lpNorm<Eigen::Infinity>() : 0.0;
    sol.block_residuals.emplace_back(label.name, norm);
  }
  return sol;
}

EquilibriumSolution solve_contingency_game(const ContingencyGame& game, const std::optional<TrajectoryProfile>& init,
                                           const GameSolveOptions& options) {
  const KktSystem system = build_kkt_mcp(game, options.ego_plan);
  const TrajectoryProfile start = init ? *init : zero_control_profile(game);
  Eigen::VectorXd v0 = system.initial_point(start, options.inequality_start);
  if (options.initial_multipliers) {
    const auto& L = system.layout();
    const auto& m = *options.initial_multipliers;
    auto put = [&v0](const IndexRange& r, const Eigen::VectorXd& values) {
      if (values.size() == r.size() && r.size() > 0) v0.segment(r.begin, r.size()) = values;
    };
    for (std::size_t th = 0; th < m.player.size() && th < L.private_multipliers.size(); ++th) {
      for (std::size_t i = 0; i < m.player[th].size() && i < L.private_multipliers[th].size(); ++i) {
        put(L.private_multipliers[th][i], m.player[th][i]);
      }
    }
    for (std::size_t th = 0; th < m.shared.size() && th < L.shared_multipliers.size(); ++th) {
      put(L.shared_multipliers[th], m.shared[th]);
    }
    put(L.rho, m.rho);
  }
  return solve_kkt_system(system, v0, options.solver);
}

std::string EquilibriumReport::summary() const {
  std::ostringstream os;
  os << (passed ? "passed" : "failed") << " (tol " << tolerance << "): stationarity " << max_stationarity
     << ", infeasibility " << primal_infeasibility << ", complementarity " << complementarity
     << ", contingency " << contingency_residual;
  return os.str();
}

EquilibriumReport verify_equilibrium(const ContingencyGame& game, const EquilibriumSolution& solution, double tol) {
  const KktSystem system = build_kkt_mcp(game, solution.ego_plan);
  const auto& L = system.layout();
  const Eigen::VectorXd v = system.pack(solution.profile, solution.multipliers);
  const Eigen::VectorXd g = system.problem().residual(v);

  EquilibriumReport report;
  report.tolerance = tol;
  report.stationarity.resize(L.primal.size());
  for (std::size_t th = 0; th < L.primal.size(); ++th) {
    report.stationarity[th].assign(L.primal[th].size(), 0.0);
    for (std::size_t i = 0; i < L.primal[th].size(); ++i) {
      if (!L.owns_block(static_cast<int>(th), static_cast<int>(i))) continue;
      const auto& r = L.primal[th][i];
      report.stationarity[th][i] = g.segment(r.begin, r.size()).lpNorm<Eigen::Infinity>();
      report.max_stationarity = std::max(report.max_stationarity, report.stationarity[th][i]);
    }
  }
  for (Eigen::Index j = 0; j < L.dimension; ++j) {
    switch (L.kind[static_cast<std::size_t>(j)]) {
      case VariableKind::kPrimal:
        break;
      case VariableKind::kEqualityMultiplier:
        report.primal_infeasibility = std::max(report.primal_infeasibility, std::abs(g[j]));
        break;
      case VariableKind::kContingencyMultiplier:
        report.contingency_residual = std::max(report.contingency_residual, std::abs(g[j]));
        break;
      case VariableKind::kInequalityMultiplier:
        report.primal_infeasibility = std::max(report.primal_infeasibility, -g[j]);
        report.complementarity = std::max({report.complementarity, std::abs(std::min(v[j], g[j])), -v[j]});
        break;
    }
  }
  const double worst = std::max({report.max_stationarity, report.primal_infeasibility, report.complementarity,
                                 report.contingency_residual});
  report.passed = std::isfinite(worst) && worst <= tol;
  return report;
}

Eigen::MatrixXd recovered_shared_multipliers(const ContingencyGame& game, const EquilibriumSolution& solution,
                                             int theta, int constraint) {
  const auto th = static_cast<std::size_t>(theta);
  const auto& spec = game.shared_constraints.at(th).at(static_cast<std::size_t>(constraint));
  // Shared multipliers of a hypothesis are stored constraint after constraint.
  Eigen::Index offset = 0;
  for (int c = 0; c < constraint; ++c) {
    const auto& s = game.shared_constraints[th][static_cast<std::size_t>(c)];
    const int last = s.last_stage < 0 ? game.horizon : s.last_stage;
    offset += static_cast<Eigen::Index>(last - s.first_stage + 1) * s.fn->output_dim();
  }
  const int last = spec.last_stage < 0 ? game.horizon : spec.last_stage;
  const Eigen::Index rows = static_cast<Eigen::Index>(last - spec.first_stage + 1) * spec.fn->output_dim();
  const Eigen::VectorXd lambda = solution.multipliers.shared.at(th).segment(offset, rows);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(spec.participants.size()), rows);
  for (std::size_t k = 0; k < spec.participants.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = (spec.multiplier_ratio[k] / spec.multiplier_ratio[0]) * lambda.transpose();
  }
  return out;
}

std::vector<Eigen::VectorXd> shared_constraint_values(const ContingencyGame& game, const TrajectoryProfile& profile) {
  std::vector<Eigen::VectorXd> out;
  for (int theta = 0; theta < game.num_hypotheses(); ++theta) {
    std::vector<double> values;
    for (const auto& s : game.shared_constraints[static_cast<std::size_t>(theta)]) {
      const int last = s.last_stage < 0 ? game.horizon : s.last_stage;
      Eigen::VectorXd input(s.fn->input_dim());
      std::vector<double> result(static_cast<std::size_t>(s.fn->output_dim()));
      for (int t = s.first_stage; t <= last; ++t) {
        Eigen::Index offset = 0;
        for (int i : s.participants) {
          const Eigen::VectorXd z = stage_vector(profile.at(theta, i), t);
          input.segment(offset, z.size()) = z;
          offset += z.size();
        }
        s.fn->evaluate(std::span<const double>(input.data(), static_cast<std::size_t>(input.size())), result);
        values.insert(values.end(), result.begin(), result.end());
      }
    }
    out.emplace_back(Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
  }
  return out;
}

}  // namespace cgames::game
