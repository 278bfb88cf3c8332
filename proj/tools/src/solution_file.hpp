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

#include <string>

#include <json.hpp>

#include "cgames/game/solve.hpp"
#include "cgames/scenarios/config.hpp"

namespace cgames::cli {

/// Provenance block written into every output file.
nlohmann::json provenance_json(const std::string& config_hash, std::uint64_t seed, const std::string& kind);

/// Config JSON with a provenance block attached (still parseable as a config).
nlohmann::json config_document(const scenarios::ScenarioConfig& config, std::uint64_t seed);

/// Solution file: provenance, the config, solver status, readable branches
/// and the packed MCP vector that `verify` re-checks.
nlohmann::json solution_document(const scenarios::ScenarioConfig& config, const game::ContingencyGame& game,
                                 const game::EquilibriumSolution& solution, std::uint64_t seed);

/// KKT report: MCP residual dump, per-block norms and the equilibrium check.
nlohmann::json kkt_report_document(const scenarios::ScenarioConfig& config, const game::ContingencyGame& game,
                                   const game::EquilibriumSolution& solution, std::uint64_t seed, double tolerance);

struct StoredSolution {
  std::string config_hash;
  game::EgoPlan ego_plan = game::EgoPlan::kPerHypothesis;
  Eigen::VectorXd mcp_solution;
};

/// Reads the fields `verify` needs; throws std::runtime_error when absent.
StoredSolution read_solution(const nlohmann::json& document);

const char* to_string(game::EgoPlan plan);

}  // namespace cgames::cli
