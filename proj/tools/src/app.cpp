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

#include "app.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cgames/eval/evaluation.hpp"
#include "cgames/game/kkt.hpp"
#include "cgames/game/solve.hpp"
#include "cgames/scenarios/builders.hpp"
#include "cgames/scenarios/config.hpp"
#include "cgames/version.hpp"
#include "solution_file.hpp"

namespace cgames::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Failures that map onto a specific exit status.
struct CommandError : std::runtime_error {
  CommandError(ExitCode c, const std::string& what) : std::runtime_error(what), code(c) {}
  ExitCode code;
};

std::string read_text(const std::string& path, ExitCode code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CommandError(code, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

scenarios::ScenarioConfig load_with_overrides(const std::string& path, const std::vector<std::string>& overrides) {
  return scenarios::parse_config(scenarios::apply_overrides(read_text(path, kExitConfigError), overrides));
}

fs::path prepare_output_dir(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw CommandError(kExitInternalError, "cannot create output directory '" + dir + "'");
  return p;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw CommandError(kExitInternalError, "cannot write '" + path.string() + "'");
}

int default_workers() { return static_cast<int>(std::max(1U, std::thread::hardware_concurrency())); }

struct CommonOptions {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, CommonOptions& o, bool config_required) {
  auto* c = sub->add_option("--config", o.config, "Scenario config (JSON)");
  if (config_required) c->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "Output directory")->capture_default_str();
  sub->add_option("--seed", o.seed, "Seed for solver restarts and sampled realizations")->capture_default_str();
  sub->add_option("--set", o.overrides, "Config override key=value (dotted keys, repeatable)");
}

int cmd_emit_defaults(const CommonOptions& o, const std::string& scenario, std::ostream& out) {
  scenarios::ScenarioId id;
  if (scenario == "jaywalking") {
    id = scenarios::ScenarioId::kJaywalking;
  } else if (scenario == "overtaking") {
    id = scenarios::ScenarioId::kOvertaking;
  } else {
    throw scenarios::ConfigError("unknown scenario '" + scenario + "'");
  }
  const std::string text = scenarios::config_to_json(scenarios::default_config(id));
  const auto config = scenarios::parse_config(scenarios::apply_overrides(text, o.overrides));
  const fs::path path = prepare_output_dir(o.out) / (scenario + ".json");
  write_file(path, config_document(config, o.seed).dump(2) + "\n");
  out << path.string() << '\n';
  return kExitSuccess;
}

int cmd_solve(const CommonOptions& o, double tolerance, std::ostream& out, std::ostream& err) {
  const auto config = load_with_overrides(o.config, o.overrides);
  const auto game = scenarios::build_game(config);
  game::GameSolveOptions options;
  options.solver.seed = o.seed;
  const auto solution = game::solve_contingency_game(game, std::nullopt, options);

  const fs::path dir = prepare_output_dir(o.out);
  write_file(dir / "solution.json", solution_document(config, game, solution, o.seed).dump(2) + "\n");
  write_file(dir / "kkt_report.json", kkt_report_document(config, game, solution, o.seed, tolerance).dump(2) + "\n");

  out << "status " << mcp::to_string(solution.solver.status) << " residual " << solution.kkt_residual
      << " iterations " << solution.solver.iterations << " time " << solution.solver.wall_time << " s\n";
  if (!solution.converged()) {
    err << "solver did not converge (" << mcp::to_string(solution.solver.status) << ")\n";
    return kExitSolverFailure;
  }
  return kExitSuccess;
}

int cmd_sweep(const CommonOptions& o, bool closed_loop, int workers, const std::string& tb_list, int points,
              const std::string& realization, std::ostream& out) {
  const auto config = load_with_overrides(o.config, o.overrides);
  eval::SweepSpec sweep = eval::SweepSpec::from_config(config);
  if (!tb_list.empty()) {
    try {
      sweep.branching_times = parse_int_list(tb_list);
    } catch (const std::invalid_argument& e) {
      throw scenarios::ConfigError(std::string("--tb-list: ") + e.what());
    }
  }
  if (points > 0) sweep = sweep.reduced(points);
  sweep.seed = o.seed;
  sweep.solve.solver.seed = o.seed;
  sweep.workers = workers;
  if (realization == "sampled") {
    sweep.realization = eval::Realization::kSampled;
  } else if (realization != "exhaustive") {
    throw scenarios::ConfigError("--realization must be exhaustive or sampled");
  }
  try {
    sweep.validate();
  } catch (const std::invalid_argument& e) {
    throw scenarios::ConfigError(e.what());
  }

  const auto records = closed_loop ? eval::run_closed_loop(sweep) : eval::run_open_loop(sweep);
  const auto rows = eval::aggregate(records);
  const auto gaps = eval::paired_gaps(records, closed_loop);
  const auto gap_rows = eval::summarize_gaps(gaps);
  const eval::Provenance provenance{scenarios::config_hash(config), kVersion, o.seed,
                                    closed_loop ? "sweep-closed" : "sweep-open"};

  const fs::path dir = prepare_output_dir(o.out);
  std::ostringstream csv, summary, distribution, heatmap;
  eval::write_records_csv(csv, records, provenance);
  eval::write_summary_json(summary, rows, gap_rows, provenance);
  eval::write_gap_distribution_csv(distribution, gaps, provenance);
  eval::write_gap_heatmap_csv(heatmap, gaps, provenance);
  write_file(dir / "records.csv", csv.str());
  write_file(dir / "summary.json", summary.str());
  write_file(dir / "gap_distribution.csv", distribution.str());
  write_file(dir / "gap_heatmap.csv", heatmap.str());

  int failures = 0;
  for (const auto& r : records) failures += r.converged ? 0 : 1;
  out << records.size() << " episodes, " << failures << " not converged; wrote " << dir.string() << '\n';
  for (const auto& g : gap_rows) {
    out << "  t_b " << g.branching_time << "  mean relative gap " << g.gap.mean << " +- " << g.gap.standard_error
        << " (n=" << g.gap.count << ")\n";
  }
  return kExitSuccess;
}

int cmd_verify(const CommonOptions& o, const std::string& solution_path, double tolerance, std::ostream& out,
               std::ostream& err) {
  const auto config = load_with_overrides(o.config, o.overrides);
  json document;
  try {
    document = json::parse(read_text(solution_path, kExitVerificationFailure));
  } catch (const json::parse_error& e) {
    throw CommandError(kExitVerificationFailure, std::string("solution file is not valid JSON: ") + e.what());
  }
  StoredSolution stored;
  try {
    stored = read_solution(document);
  } catch (const std::exception& e) {
    throw CommandError(kExitVerificationFailure, e.what());
  }
  const std::string hash = scenarios::config_hash(config);
  if (stored.config_hash != hash) {
    err << "config hash mismatch: solution " << stored.config_hash << ", config " << hash << '\n';
    return kExitVerificationFailure;
  }
  const auto game = scenarios::build_game(config);
  const auto system = game::build_kkt_mcp(game, stored.ego_plan);
  if (stored.mcp_solution.size() != system.dimension()) {
    err << "solution has " << stored.mcp_solution.size() << " components, the config implies " << system.dimension()
        << '\n';
    return kExitVerificationFailure;
  }
  game::EquilibriumSolution solution;
  solution.ego_plan = stored.ego_plan;
  solution.profile = system.unpack_profile(stored.mcp_solution);
  solution.multipliers = system.unpack_multipliers(stored.mcp_solution);
  const auto check = mcp::check_mcp_solution(system.problem(), stored.mcp_solution, tolerance);
  const auto report = game::verify_equilibrium(game, solution, tolerance);

  json j;
  j["provenance"] = provenance_json(hash, o.seed, "verify");
  j["solution_file"] = solution_path;
  j["tolerance"] = tolerance;
  j["mcp_satisfied"] = check.satisfied;
  j["worst_violation"] = check.worst_violation;
  j["equilibrium_passed"] = report.passed;
  j["summary"] = report.summary();
  write_file(prepare_output_dir(o.out) / "verify_report.json", j.dump(2) + "\n");

  out << "mcp " << (check.satisfied ? "ok" : "violated") << " (worst " << check.worst_violation << "), "
      << report.summary() << '\n';
  return check.satisfied && report.passed ? kExitSuccess : kExitVerificationFailure;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("'" + item + "' is not an integer");
    }
    if (used != item.size()) throw std::invalid_argument("'" + item + "' is not an integer");
    values.push_back(value);
  }
  if (values.empty()) throw std::invalid_argument("empty list");
  return values;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contingency-game solver and evaluation tool", "cgames"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions common;
  std::string scenario;
  std::string solution_path;
  std::string tb_list;
  std::string realization = "exhaustive";
  int workers = default_workers();
  int points = 0;
  double tolerance = 1e-6;

  auto* emit = app.add_subcommand("emit-defaults", "Write the default config of a scenario");
  add_common(emit, common, false);
  emit->add_option("--scenario", scenario, "jaywalking or overtaking")->required();

  auto* solve = app.add_subcommand("solve", "Solve one contingency game");
  add_common(solve, common, true);
  solve->add_option("--tol", tolerance, "Tolerance of the KKT report check")->capture_default_str();

  std::vector<CLI::App*> sweeps;
  for (const char* name : {"sweep-open", "sweep-closed"}) {
    auto* s = app.add_subcommand(name, std::string(name) == "sweep-open" ? "Open-loop branching-time sweep"
                                                                          : "Closed-loop sweep with re-planning");
    add_common(s, common, true);
    s->add_option("--workers", workers, "Worker threads")->capture_default_str();
    s->add_option("--tb-list", tb_list, "Branching times, e.g. 0,5,10,15,20,25 (default: from config)");
    s->add_option("--points", points, "Use this many evenly spread grid points (0 = full grid)")
        ->capture_default_str();
    s->add_option("--realization", realization, "exhaustive or sampled")->capture_default_str();
    sweeps.push_back(s);
  }

  auto* verify = app.add_subcommand("verify", "Re-check a stored solution against its config");
  add_common(verify, common, true);
  verify->add_option("--solution", solution_path, "Solution file written by solve")->required();
  verify->add_option("--tol", tolerance, "Verification tolerance")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitConfigError;
  }

  try {
    if (emit->parsed()) return cmd_emit_defaults(common, scenario, out);
    if (solve->parsed()) return cmd_solve(common, tolerance, out, err);
    if (verify->parsed()) return cmd_verify(common, solution_path, tolerance, out, err);
    for (auto* s : sweeps) {
      if (s->parsed()) {
        return cmd_sweep(common, s->get_name() == "sweep-closed", workers, tb_list, points, realization, out);
      }
    }
  } catch (const scenarios::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const CommandError& e) {
    err << "error: " << e.what() << '\n';
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternalError;
  }
  return kExitInternalError;
}

}  // namespace cgames::cli
