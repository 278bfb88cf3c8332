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

#include "solution_file.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

#include "cgames/game/kkt.hpp"
#include "cgames/game/operations.hpp"
#include "cgames/version.hpp"

namespace cgames::cli {

using nlohmann::json;

namespace {

// Columns of a matrix as a list of vectors (one entry per time step).
json columns(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    std::vector<double> col(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) col[static_cast<std::size_t>(r)] = m(r, c);
    out.push_back(col);
  }
  return out;
}

}  // namespace

const char* to_string(game::EgoPlan plan) {
  return plan == game::EgoPlan::kShared ? "shared" : "per_hypothesis";
}

json provenance_json(const std::string& config_hash, std::uint64_t seed, const std::string& kind) {
  return {{"config_hash", config_hash}, {"version", kVersion}, {"seed", seed}, {"kind", kind}};
}

json config_document(const scenarios::ScenarioConfig& config, std::uint64_t seed) {
  json j = json::parse(scenarios::config_to_json(config));
  j["provenance"] = provenance_json(scenarios::config_hash(config), seed, "config");
  return j;
}

json solution_document(const scenarios::ScenarioConfig& config, const game::ContingencyGame& game,
                       const game::EquilibriumSolution& solution, std::uint64_t seed) {
  const game::KktSystem system = game::build_kkt_mcp(game, solution.ego_plan);
  const Eigen::VectorXd v = system.pack(solution.profile, solution.multipliers);

  json j;
  j["provenance"] = provenance_json(scenarios::config_hash(config), seed, "solution");
  j["config"] = json::parse(scenarios::config_to_json(config));
  j["status"] = mcp::to_string(solution.solver.status);
  j["converged"] = solution.converged();
  j["kkt_residual"] = solution.kkt_residual;
  j["iterations"] = solution.solver.iterations;
  j["restarts"] = solution.solver.restarts;
  j["wall_time"] = solution.solver.wall_time;
  j["ego_plan"] = to_string(solution.ego_plan);
  j["branching_time"] = game.branching_time;
  j["expected_ego_cost"] = game::expected_cost(game, solution.profile);

  json branches = json::array();
  for (int theta = 0; theta < game.num_hypotheses(); ++theta) {
    json players = json::array();
    for (int i = 0; i < game.num_players(theta); ++i) {
      const auto& traj = solution.profile.at(theta, i);
      players.push_back({{"player", game.player(theta, i).name},
                         {"cost", game::trajectory_cost(game, solution.profile, theta, i)},
                         {"states", columns(traj.states)},
                         {"controls", columns(traj.controls)}});
    }
    branches.push_back({{"hypothesis", game.belief.hypotheses[static_cast<std::size_t>(theta)]},
                        {"probability", game.belief.probabilities[static_cast<std::size_t>(theta)]},
                        {"players", players}});
  }
  j["branches"] = branches;
  j["mcp_solution"] = std::vector<double>(v.data(), v.data() + v.size());
  return j;
}

json kkt_report_document(const scenarios::ScenarioConfig& config, const game::ContingencyGame& game,
                         const game::EquilibriumSolution& solution, std::uint64_t seed, double tolerance) {
  const game::KktSystem system = game::build_kkt_mcp(game, solution.ego_plan);
  const Eigen::VectorXd v = system.pack(solution.profile, solution.multipliers);
  std::ostringstream dump;
  mcp::write_solution_report(dump, system.problem(), v);
  json j = json::parse(dump.str());
  j["provenance"] = provenance_json(scenarios::config_hash(config), seed, "kkt_report");
  j["structural_nonzeros"] = system.structural_nonzeros();

  const auto check = mcp::check_mcp_solution(system.problem(), v, tolerance);
  const auto report = game::verify_equilibrium(game, solution, tolerance);
  j["check"] = {{"tolerance", tolerance},
                {"mcp_satisfied", check.satisfied},
                {"worst_violation", check.worst_violation},
                {"worst_index", check.worst_index},
                {"equilibrium_passed", report.passed},
                {"max_stationarity", report.max_stationarity},
                {"primal_infeasibility", report.primal_infeasibility},
                {"complementarity", report.complementarity},
                {"contingency_residual", report.contingency_residual}};
  return j;
}

StoredSolution read_solution(const json& document) {
  if (!document.is_object() || !document.contains("mcp_solution") || !document.contains("provenance")) {
    throw std::runtime_error("not a solution file: mcp_solution or provenance missing");
  }
  StoredSolution s;
  s.config_hash = document.at("provenance").at("config_hash").get<std::string>();
  const std::string plan = document.value("ego_plan", std::string("per_hypothesis"));
  if (plan == "shared") {
    s.ego_plan = game::EgoPlan::kShared;
  } else if (plan == "per_hypothesis") {
    s.ego_plan = game::EgoPlan::kPerHypothesis;
  } else {
    throw std::runtime_error("unknown ego_plan '" + plan + "'");
  }
  const auto values = document.at("mcp_solution").get<std::vector<double>>();
  s.mcp_solution = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return s;
}

}  // namespace cgames::cli
