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

#include "cgames/eval/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "cgames/game/operations.hpp"
#include "cgames/scenarios/builders.hpp"

namespace cgames::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs task(i) for i in [0, n) on `workers` threads. The first exception is
// rethrown after all threads have joined.
void parallel_for(int n, int workers, const std::function<void(int)>& task) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Plan {
  game::ContingencyGame game;
  std::optional<game::EquilibriumSolution> solution;
  std::string error;
};

Plan solve_plan(const game::ContingencyGame& base, int branching_time, const game::GameSolveOptions& options) {
  Plan p{base.with_branching_time(branching_time), std::nullopt, {}};
  try {
    p.solution = game::solve_contingency_game(p.game, std::nullopt, options);
  } catch (const std::exception& e) {
    p.error = e.what();
  }
  return p;
}

double ego_progress(const game::TrajectoryProfile& profile, int theta) {
  const auto& ego = profile.at(theta, 0).states;
  return ego(0, ego.cols() - 1) - ego(0, 0);
}

EpisodeRecord base_record(const SweepSpec& sweep, Method method, int t_b, int ic) {
  EpisodeRecord r;
  r.scenario = scenarios::to_string(sweep.config.scenario);
  r.method = method;
  r.branching_time = t_b;
  r.initial_condition = ic;
  r.p1 = sweep.positions[static_cast<std::size_t>(ic)].x();
  r.p2 = sweep.positions[static_cast<std::size_t>(ic)].y();
  r.closed_loop_cost = kNaN;
  return r;
}

void fill_plan_record(EpisodeRecord& r, const Plan& plan, double verify_tolerance) {
  if (!plan.solution) {
    r.converged = false;
    r.verified = false;
    r.status = "error: " + plan.error;
    r.open_loop_cost = r.progress = r.mean_opponent_distance = r.min_constraint = kNaN;
    return;
  }
  const auto& sol = *plan.solution;
  const auto& g = plan.game;
  r.converged = sol.converged();
  r.verified = r.converged && game::verify_equilibrium(g, sol, verify_tolerance).passed;
  r.status = mcp::to_string(sol.solver.status);
  r.kkt_residual = sol.kkt_residual;
  r.iterations = sol.solver.iterations;
  r.wall_time = sol.solver.wall_time;
  r.open_loop_cost = game::expected_cost(g, sol.profile);
  r.progress = 0.0;
  r.mean_opponent_distance = 0.0;
  for (int theta = 0; theta < g.num_hypotheses(); ++theta) {
    const double b = g.belief.probabilities[static_cast<std::size_t>(theta)];
    r.progress += b * ego_progress(sol.profile, theta);
    r.mean_opponent_distance += b * mean_opponent_distance(g, sol.profile, theta);
  }
  r.min_constraint = min_shared_constraint(g, sol.profile);
}

// Closed-loop evaluation of one plan. Exhaustive mode weights every
// hypothesis with the belief; sampled mode draws one.
void fill_closed_loop_record(EpisodeRecord& r, const Plan& plan, int t_b, const std::vector<int>& realized,
                             const std::vector<double>& weights, const game::GameSolveOptions& options,
                             double verify_tolerance) {
  fill_plan_record(r, plan, verify_tolerance);
  if (!plan.solution) return;
  const double plan_min = r.min_constraint;
  r.closed_loop_cost = 0.0;
  r.progress = 0.0;
  r.mean_opponent_distance = 0.0;
  r.min_constraint = std::numeric_limits<double>::infinity();
  bool ok = r.converged;
  for (std::size_t s = 0; s < realized.size(); ++s) {
    const int theta = realized[s];
    const double w = weights[s];
    try {
      const auto exec = execute_with_replanning(plan.game, *plan.solution, theta, t_b, options);
      r.closed_loop_cost += w * game::trajectory_cost(exec.game, exec.profile, 0, 0);
      r.progress += w * ego_progress(exec.profile, 0);
      r.mean_opponent_distance += w * mean_opponent_distance(exec.game, exec.profile, 0);
      r.min_constraint = std::min(r.min_constraint, min_shared_constraint(exec.game, exec.profile));
      if (exec.replanned) {
        r.wall_time += exec.replan.solver.wall_time;
        r.iterations += exec.replan.solver.iterations;
        r.kkt_residual = std::max(r.kkt_residual, exec.replan.kkt_residual);
        if (!exec.replan.converged()) {
          ok = false;
          r.status = std::string("replan ") + mcp::to_string(exec.replan.solver.status);
        } else if (!game::verify_equilibrium(exec.replan_game, exec.replan, verify_tolerance).passed) {
          r.verified = false;
        }
      }
    } catch (const std::exception& e) {
      ok = false;
      r.status = std::string("replan error: ") + e.what();
      r.closed_loop_cost = kNaN;
      r.min_constraint = plan_min;
      break;
    }
  }
  r.converged = ok;
  r.verified = r.verified && ok;
}

}  // namespace

const char* to_string(Method method) { return method == Method::kContingency ? "contingency" : "baseline"; }

SweepSpec SweepSpec::from_config(const scenarios::ScenarioConfig& config) {
  config.validate();
  SweepSpec s;
  s.config = config;
  s.positions = scenarios::grid_positions(config.grid);
  s.branching_times = config.grid.branching_times;
  return s;
}

SweepSpec SweepSpec::reduced(int count) const {
  if (count <= 0) throw std::invalid_argument("reduced sweep needs a positive count");
  SweepSpec s = *this;
  const int n = static_cast<int>(positions.size());
  if (count >= n) return s;
  s.positions.clear();
  for (int i = 0; i < count; ++i) {
    const int index = static_cast<int>(std::lround(static_cast<double>(i) * (n - 1) / std::max(1, count - 1)));
    s.positions.push_back(positions[static_cast<std::size_t>(count == 1 ? 0 : index)]);
  }
  return s;
}

void SweepSpec::validate() const {
  config.validate();
  if (positions.empty()) throw std::invalid_argument("sweep grid must not be empty");
  if (branching_times.empty()) throw std::invalid_argument("sweep needs at least one branching time");
  for (int t : branching_times) {
    if (t < 0 || t > config.horizon) throw std::invalid_argument("sweep branching times must lie in [0, horizon]");
  }
  if (methods.empty()) throw std::invalid_argument("sweep needs at least one method");
  if (workers < 1) throw std::invalid_argument("sweep needs at least one worker");
  if (!(verify_tolerance > 0.0)) throw std::invalid_argument("sweep verify tolerance must be positive");
}

game::ContingencyGame remaining_game(const game::ContingencyGame& game, const game::TrajectoryProfile& profile,
                                     int theta, int branching_time) {
  if (branching_time < 0 || branching_time >= game.horizon) {
    throw std::invalid_argument("remaining_game: branching time must lie in [0, horizon)");
  }
  auto g = game.single_hypothesis(theta);
  g.horizon = game.horizon - branching_time;
  const auto col = static_cast<Eigen::Index>(branching_time);
  g.ego.initial_state = profile.at(theta, 0).states.col(col);
  for (std::size_t k = 0; k < g.others[0].size(); ++k) {
    g.others[0][k].initial_state = profile.at(theta, static_cast<int>(k) + 1).states.col(col);
  }
  g.validate();
  return g;
}

ExecutedEpisode execute_with_replanning(const game::ContingencyGame& game, const game::EquilibriumSolution& plan,
                                        int theta, int branching_time, const game::GameSolveOptions& options) {
  ExecutedEpisode out;
  out.game = game.single_hypothesis(theta);
  const auto& branch = plan.profile.branches.at(static_cast<std::size_t>(theta));
  out.profile.branches = {branch};
  if (branching_time >= game.horizon) return out;

  out.replan_game = remaining_game(game, plan.profile, theta, branching_time);
  const auto& tail_game = out.replan_game;
  const auto tb = static_cast<Eigen::Index>(branching_time);
  const Eigen::Index rest = game.horizon - tb;
  game::TrajectoryProfile init;
  init.branches.resize(1);
  for (const auto& traj : branch) {
    init.branches[0].push_back({traj.states.rightCols(rest), traj.controls.rightCols(rest)});
  }
  auto tail_options = options;
  tail_options.ego_plan = game::EgoPlan::kPerHypothesis;
  tail_options.initial_multipliers.reset();
  out.replan = game::solve_contingency_game(tail_game, init, tail_options);
  out.replanned = true;

  for (std::size_t i = 0; i < branch.size(); ++i) {
    const auto& head = branch[i];
    const auto& tail = out.replan.profile.branches[0][i];
    auto& exec = out.profile.branches[0][i];
    exec.states.resize(head.states.rows(), game.horizon);
    exec.controls.resize(head.controls.rows(), game.horizon);
    exec.states << head.states.leftCols(tb), tail.states;
    exec.controls << head.controls.leftCols(tb), tail.controls;
  }
  return out;
}

double mean_opponent_distance(const game::ContingencyGame& game, const game::TrajectoryProfile& profile, int theta) {
  const int players = game.num_players(theta);
  if (players < 2) return kNaN;
  const auto& ego = profile.at(theta, 0).states;
  double total = 0.0;
  for (Eigen::Index t = 0; t < ego.cols(); ++t) {
    double closest = std::numeric_limits<double>::infinity();
    for (int k = 1; k < players; ++k) {
      const auto& other = profile.at(theta, k).states;
      closest = std::min(closest, (ego.col(t).head<2>() - other.col(t).head<2>()).norm());
    }
    total += closest;
  }
  return total / static_cast<double>(ego.cols());
}

double min_shared_constraint(const game::ContingencyGame& game, const game::TrajectoryProfile& profile) {
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& values : game::shared_constraint_values(game, profile)) {
    if (values.size() > 0) lowest = std::min(lowest, values.minCoeff());
  }
  return lowest;
}

std::vector<EpisodeRecord> run_open_loop(const SweepSpec& sweep) {
  sweep.validate();
  const int n = static_cast<int>(sweep.positions.size());
  const int T = sweep.config.horizon;
  std::vector<std::vector<EpisodeRecord>> per_point(static_cast<std::size_t>(n));
  parallel_for(n, sweep.workers, [&](int ic) {
    const auto& pos = sweep.positions[static_cast<std::size_t>(ic)];
    const auto base = scenarios::build_game(scenarios::with_swept_position(sweep.config, pos.x(), pos.y()));
    const Plan baseline = solve_plan(base, T, sweep.solve);
    auto& out = per_point[static_cast<std::size_t>(ic)];
    for (int t_b : sweep.branching_times) {
      std::optional<Plan> contingency;
      for (Method m : sweep.methods) {
        EpisodeRecord r = base_record(sweep, m, t_b, ic);
        if (m == Method::kBaseline || t_b == T) {
          fill_plan_record(r, baseline, sweep.verify_tolerance);
        } else {
          if (!contingency) contingency = solve_plan(base, t_b, sweep.solve);
          fill_plan_record(r, *contingency, sweep.verify_tolerance);
        }
        out.push_back(std::move(r));
      }
    }
  });
  std::vector<EpisodeRecord> records;
  for (auto& v : per_point) records.insert(records.end(), v.begin(), v.end());
  return records;
}

std::vector<EpisodeRecord> run_closed_loop(const SweepSpec& sweep) {
  sweep.validate();
  const int n = static_cast<int>(sweep.positions.size());
  const int T = sweep.config.horizon;
  const auto& belief = sweep.config.belief;
  std::vector<std::vector<EpisodeRecord>> per_point(static_cast<std::size_t>(n));
  parallel_for(n, sweep.workers, [&](int ic) {
    const auto& pos = sweep.positions[static_cast<std::size_t>(ic)];
    const auto base = scenarios::build_game(scenarios::with_swept_position(sweep.config, pos.x(), pos.y()));
    const Plan baseline = solve_plan(base, T, sweep.solve);
    auto& out = per_point[static_cast<std::size_t>(ic)];
    for (int t_b : sweep.branching_times) {
      std::optional<Plan> contingency;
      for (Method m : sweep.methods) {
        EpisodeRecord r = base_record(sweep, m, t_b, ic);
        std::vector<int> realized;
        std::vector<double> weights;
        if (sweep.realization == Realization::kExhaustive) {
          for (std::size_t theta = 0; theta < belief.size(); ++theta) {
            if (belief[theta] > 0.0) {
              realized.push_back(static_cast<int>(theta));
              weights.push_back(belief[theta]);
            }
          }
        } else {
          std::seed_seq seq{static_cast<std::uint64_t>(sweep.seed), static_cast<std::uint64_t>(ic),
                            static_cast<std::uint64_t>(t_b), static_cast<std::uint64_t>(m)};
          std::mt19937_64 rng(seq);
          std::discrete_distribution<int> draw(belief.begin(), belief.end());
          realized.push_back(draw(rng));
          weights.push_back(1.0);
          r.realized_hypothesis = sweep.config.hypotheses[static_cast<std::size_t>(realized[0])];
        }
        const Plan* plan = &baseline;
        if (m == Method::kContingency && t_b != T) {
          if (!contingency) contingency = solve_plan(base, t_b, sweep.solve);
          plan = &*contingency;
        }
        fill_closed_loop_record(r, *plan, t_b, realized, weights, sweep.solve, sweep.verify_tolerance);
        out.push_back(std::move(r));
      }
    }
  });
  std::vector<EpisodeRecord> records;
  for (auto& v : per_point) records.insert(records.end(), v.begin(), v.end());
  return records;
}

double relative_cost_gap(double baseline_cost, double contingency_cost) {
  if (baseline_cost == 0.0) throw std::domain_error("relative_cost_gap: baseline cost is zero");
  return (baseline_cost - contingency_cost) / baseline_cost;
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) {
    s.mean = kNaN;
    s.standard_error = kNaN;
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.count;
  if (s.count > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.standard_error = std::sqrt(sq / (s.count - 1)) / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

std::vector<SummaryRow> aggregate(const std::vector<EpisodeRecord>& records) {
  using Key = std::tuple<std::string, int, int>;
  std::map<Key, std::vector<const EpisodeRecord*>> groups;
  for (const auto& r : records) groups[{r.scenario, static_cast<int>(r.method), r.branching_time}].push_back(&r);
  std::vector<SummaryRow> rows;
  for (const auto& [key, members] : groups) {
    SummaryRow row;
    row.scenario = std::get<0>(key);
    row.method = static_cast<Method>(std::get<1>(key));
    row.branching_time = std::get<2>(key);
    row.episodes = static_cast<int>(members.size());
    std::vector<double> open, closed, progress, distance, constraint;
    for (const auto* r : members) {
      if (!r->converged) {
        ++row.failures;
        continue;
      }
      open.push_back(r->open_loop_cost);
      if (!std::isnan(r->closed_loop_cost)) closed.push_back(r->closed_loop_cost);
      progress.push_back(r->progress);
      distance.push_back(r->mean_opponent_distance);
      constraint.push_back(r->min_constraint);
    }
    row.open_loop_cost = summarize(open);
    row.closed_loop_cost = summarize(closed);
    row.progress = summarize(progress);
    row.mean_opponent_distance = summarize(distance);
    row.min_constraint = summarize(constraint);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<GapRecord> paired_gaps(const std::vector<EpisodeRecord>& records, bool closed_loop) {
  using Key = std::tuple<std::string, int, int, std::string>;
  std::map<Key, const EpisodeRecord*> baseline;
  for (const auto& r : records) {
    if (r.method == Method::kBaseline && r.converged) {
      baseline[{r.scenario, r.branching_time, r.initial_condition, r.realized_hypothesis}] = &r;
    }
  }
  std::vector<GapRecord> gaps;
  for (const auto& r : records) {
    if (r.method != Method::kContingency || !r.converged) continue;
    const auto it = baseline.find({r.scenario, r.branching_time, r.initial_condition, r.realized_hypothesis});
    if (it == baseline.end()) continue;
    const double base_cost = closed_loop ? it->second->closed_loop_cost : it->second->open_loop_cost;
    const double ours = closed_loop ? r.closed_loop_cost : r.open_loop_cost;
    if (std::isnan(base_cost) || std::isnan(ours) || base_cost == 0.0) continue;
    gaps.push_back({r.scenario, r.branching_time, r.initial_condition, r.p1, r.p2, r.realized_hypothesis,
                    relative_cost_gap(base_cost, ours)});
  }
  return gaps;
}

std::vector<GapSummaryRow> summarize_gaps(const std::vector<GapRecord>& gaps) {
  std::map<std::pair<std::string, int>, std::vector<double>> groups;
  for (const auto& g : gaps) groups[{g.scenario, g.branching_time}].push_back(g.gap);
  std::vector<GapSummaryRow> rows;
  for (const auto& [key, values] : groups) rows.push_back({key.first, key.second, summarize(values)});
  return rows;
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string provenance_prefix(const Provenance& p) {
  return std::to_string(kRecordColumnsVersion) + "," + csv_field(p.config_hash) + "," + csv_field(p.version) + "," +
         std::to_string(p.seed) + "," + csv_field(p.kind);
}

constexpr const char* kProvenanceHeader = "columns_version,config_hash,version,seed,kind";

nlohmann::json metric_json(const MetricSummary& m) {
  nlohmann::json j;
  j["mean"] = std::isfinite(m.mean) ? nlohmann::json(m.mean) : nlohmann::json(nullptr);
  j["standard_error"] = std::isfinite(m.standard_error) ? nlohmann::json(m.standard_error) : nlohmann::json(nullptr);
  j["count"] = m.count;
  return j;
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<EpisodeRecord>& records, const Provenance& provenance) {
  os << kProvenanceHeader
     << ",scenario,method,branching_time,initial_condition,p1,p2,realized_hypothesis,open_loop_cost,"
        "closed_loop_cost,progress,mean_opponent_distance,min_constraint,converged,verified,status,kkt_residual,"
        "iterations,wall_time\r\n";
  const std::string prefix = provenance_prefix(provenance);
  for (const auto& r : records) {
    os << prefix << ',' << csv_field(r.scenario) << ',' << to_string(r.method) << ',' << r.branching_time << ','
       << r.initial_condition << ',' << number(r.p1) << ',' << number(r.p2) << ',' << csv_field(r.realized_hypothesis)
       << ',' << number(r.open_loop_cost) << ',' << number(r.closed_loop_cost) << ',' << number(r.progress) << ','
       << number(r.mean_opponent_distance) << ',' << number(r.min_constraint) << ',' << (r.converged ? 1 : 0) << ','
       << (r.verified ? 1 : 0) << ','
       << csv_field(r.status) << ',' << number(r.kkt_residual) << ',' << r.iterations << ','
       << number(r.wall_time) << "\r\n";
  }
}

void write_summary_json(std::ostream& os, const std::vector<SummaryRow>& rows, const std::vector<GapSummaryRow>& gaps,
                        const Provenance& provenance) {
  nlohmann::json j;
  j["provenance"] = {{"config_hash", provenance.config_hash},
                     {"version", provenance.version},
                     {"seed", provenance.seed},
                     {"kind", provenance.kind}};
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"scenario", r.scenario},
                         {"method", to_string(r.method)},
                         {"branching_time", r.branching_time},
                         {"episodes", r.episodes},
                         {"failures", r.failures},
                         {"open_loop_cost", metric_json(r.open_loop_cost)},
                         {"closed_loop_cost", metric_json(r.closed_loop_cost)},
                         {"progress", metric_json(r.progress)},
                         {"mean_opponent_distance", metric_json(r.mean_opponent_distance)},
                         {"min_constraint", metric_json(r.min_constraint)}});
  }
  j["relative_gap"] = nlohmann::json::array();
  for (const auto& g : gaps) {
    j["relative_gap"].push_back(
        {{"scenario", g.scenario}, {"branching_time", g.branching_time}, {"gap", metric_json(g.gap)}});
  }
  os << j.dump(2) << '\n';
}

void write_gap_distribution_csv(std::ostream& os, const std::vector<GapRecord>& gaps, const Provenance& provenance) {
  os << kProvenanceHeader << ",scenario,branching_time,initial_condition,realized_hypothesis,relative_gap\r\n";
  const std::string prefix = provenance_prefix(provenance);
  for (const auto& g : gaps) {
    os << prefix << ',' << csv_field(g.scenario) << ',' << g.branching_time << ',' << g.initial_condition << ','
       << csv_field(g.realized_hypothesis) << ',' << number(g.gap) << "\r\n";
  }
}

void write_gap_heatmap_csv(std::ostream& os, const std::vector<GapRecord>& gaps, const Provenance& provenance) {
  std::map<std::tuple<std::string, int, int>, std::pair<Eigen::Vector2d, std::vector<double>>> cells;
  for (const auto& g : gaps) {
    auto& cell = cells[{g.scenario, g.branching_time, g.initial_condition}];
    cell.first = Eigen::Vector2d(g.p1, g.p2);
    cell.second.push_back(g.gap);
  }
  os << kProvenanceHeader << ",scenario,branching_time,initial_condition,p1,p2,mean_relative_gap\r\n";
  const std::string prefix = provenance_prefix(provenance);
  for (const auto& [key, cell] : cells) {
    os << prefix << ',' << csv_field(std::get<0>(key)) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
       << number(cell.first.x()) << ',' << number(cell.first.y()) << ',' << number(summarize(cell.second).mean)
       << "\r\n";
  }
}

}  // namespace cgames::eval
