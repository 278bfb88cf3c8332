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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cgames/game/solve.hpp"
#include "cgames/game/types.hpp"
#include "cgames/scenarios/config.hpp"

namespace cgames::eval {

enum class Method { kContingency, kBaseline };
const char* to_string(Method method);

/// How the realized hypothesis of a closed-loop episode is chosen.
enum class Realization {
  /// Every hypothesis is executed; costs are weighted by the belief.
  kExhaustive,
  /// One hypothesis is drawn from the belief with the sweep seed.
  kSampled,
};

struct SweepSpec {
  scenarios::ScenarioConfig config;
  /// Initial positions of the swept non-ego agent.
  std::vector<Eigen::Vector2d> positions;
  std::vector<int> branching_times;
  std::vector<Method> methods{Method::kContingency, Method::kBaseline};
  Realization realization = Realization::kExhaustive;
  std::uint64_t seed = 0;
  int workers = 1;
  game::GameSolveOptions solve;
  /// Tolerance of the equilibrium check run on every converged solve.
  double verify_tolerance = 1e-6;

  /// Grid, branching times and belief taken from the config.
  static SweepSpec from_config(const scenarios::ScenarioConfig& config);
  /// Keeps `count` positions spread evenly over the grid (order preserved).
  SweepSpec reduced(int count) const;

  void validate() const;
};

struct EpisodeRecord {
  std::string scenario;
  Method method = Method::kContingency;
  int branching_time = 0;
  int initial_condition = 0;
  double p1 = 0.0;
  double p2 = 0.0;
  /// Label of the realized hypothesis; "expected" for belief-weighted
  /// closed-loop records and for open-loop records.
  std::string realized_hypothesis = "expected";
  /// Belief-weighted ego cost of the first-phase plan.
  double open_loop_cost = 0.0;
  /// Ego cost of the executed trajectory (NaN for open-loop records).
  double closed_loop_cost = 0.0;
  /// Longitudinal distance travelled by the ego [m].
  double progress = 0.0;
  /// Time average of the distance to the closest non-ego agent [m].
  double mean_opponent_distance = 0.0;
  /// Smallest shared (collision) constraint value along the trajectory.
  double min_constraint = 0.0;
  bool converged = false;
  /// Every solve of the episode converged and passed verify_equilibrium.
  bool verified = false;
  std::string status;
  double kkt_residual = 0.0;
  int iterations = 0;
  double wall_time = 0.0;  // seconds, all solves of the episode
};

/// Closed-loop trajectory of one realized hypothesis.
struct ExecutedEpisode {
  game::ContingencyGame game;     // single hypothesis, full horizon
  game::TrajectoryProfile profile;  // one branch
  game::ContingencyGame replan_game;  // hypothesis theta, stages t_b+1..T
  game::EquilibriumSolution replan;
  bool replanned = false;
};

/// Game of hypothesis `theta` over stages t_b+1..T, starting from the
/// states that the branch `theta` of `profile` reaches at stage t_b+1.
game::ContingencyGame remaining_game(const game::ContingencyGame& game, const game::TrajectoryProfile& profile,
                                     int theta, int branching_time);

/// Executes branch `theta` of `plan` for t = 1..t_b, re-solves the game under
/// `theta` from the reached state (warm-started from the branch tail) and
/// returns the concatenated trajectories.
ExecutedEpisode execute_with_replanning(const game::ContingencyGame& game, const game::EquilibriumSolution& plan,
                                        int theta, int branching_time, const game::GameSolveOptions& options);

/// Time-averaged distance from the ego to the closest other agent, branch theta.
double mean_opponent_distance(const game::ContingencyGame& game, const game::TrajectoryProfile& profile, int theta);
/// Smallest shared constraint value over all hypotheses (+inf without constraints).
double min_shared_constraint(const game::ContingencyGame& game, const game::TrajectoryProfile& profile);

std::vector<EpisodeRecord> run_open_loop(const SweepSpec& sweep);
std::vector<EpisodeRecord> run_closed_loop(const SweepSpec& sweep);

/// (J_base - J_ours) / J_base. Throws std::domain_error when J_base == 0.
double relative_cost_gap(double baseline_cost, double contingency_cost);

struct MetricSummary {
  double mean = 0.0;
  /// Sample standard deviation over sqrt(n); zero for a single value.
  double standard_error = 0.0;
  int count = 0;
};

MetricSummary summarize(const std::vector<double>& values);

struct SummaryRow {
  std::string scenario;
  Method method = Method::kContingency;
  int branching_time = 0;
  int episodes = 0;
  int failures = 0;
  MetricSummary open_loop_cost;
  MetricSummary closed_loop_cost;
  MetricSummary progress;
  MetricSummary mean_opponent_distance;
  MetricSummary min_constraint;
};

/// Groups records by scenario, method and branching time (sorted) and
/// summarizes every metric over converged records.
std::vector<SummaryRow> aggregate(const std::vector<EpisodeRecord>& records);

/// Relative gap of one initial condition: baseline and contingency records
/// with equal scenario, t_b, initial condition and realized hypothesis.
struct GapRecord {
  std::string scenario;
  int branching_time = 0;
  int initial_condition = 0;
  double p1 = 0.0;
  double p2 = 0.0;
  std::string realized_hypothesis;
  double gap = 0.0;
};

/// Pairs converged records; `closed_loop` selects which cost is compared.
std::vector<GapRecord> paired_gaps(const std::vector<EpisodeRecord>& records, bool closed_loop);

struct GapSummaryRow {
  std::string scenario;
  int branching_time = 0;
  MetricSummary gap;
};

std::vector<GapSummaryRow> summarize_gaps(const std::vector<GapRecord>& gaps);

/// Provenance written into every output file.
struct Provenance {
  std::string config_hash;
  std::string version;
  std::uint64_t seed = 0;
  std::string kind;
};

inline constexpr int kRecordColumnsVersion = 1;

void write_records_csv(std::ostream& os, const std::vector<EpisodeRecord>& records, const Provenance& provenance);
void write_summary_json(std::ostream& os, const std::vector<SummaryRow>& rows, const std::vector<GapSummaryRow>& gaps,
                        const Provenance& provenance);
/// One row per (t_b, initial condition) with the relative gap.
void write_gap_distribution_csv(std::ostream& os, const std::vector<GapRecord>& gaps, const Provenance& provenance);
/// Mean relative gap per grid position and t_b.
void write_gap_heatmap_csv(std::ostream& os, const std::vector<GapRecord>& gaps, const Provenance& provenance);

/// RFC-4180 quoting for a single field.
std::string csv_field(const std::string& value);

}  // namespace cgames::eval
