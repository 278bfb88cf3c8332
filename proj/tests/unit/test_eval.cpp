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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cgames/eval/evaluation.hpp"
#include "cgames/game/operations.hpp"
#include "cgames/scenarios/builders.hpp"

namespace eval = cgames::eval;
namespace sc = cgames::scenarios;
namespace game = cgames::game;

namespace {

eval::EpisodeRecord record(eval::Method m, int t_b, int ic, double open, double closed, bool converged = true) {
  eval::EpisodeRecord r;
  r.scenario = "overtaking";
  r.method = m;
  r.branching_time = t_b;
  r.initial_condition = ic;
  r.open_loop_cost = open;
  r.closed_loop_cost = closed;
  r.converged = converged;
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream s(text);
  std::string line;
  while (std::getline(s, line)) out.push_back(line);
  return out;
}

eval::SweepSpec small_sweep(sc::ScenarioId id, std::vector<int> branching_times) {
  auto spec = eval::SweepSpec::from_config(sc::default_config(id)).reduced(1);
  spec.branching_times = std::move(branching_times);
  return spec;
}

}  // namespace

TEST(Metrics, SummarizeMeanAndStandardError) {
  const auto s = eval::summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(s.count, 4);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.standard_error, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  const auto one = eval::summarize({7.0});
  EXPECT_DOUBLE_EQ(one.mean, 7.0);
  EXPECT_DOUBLE_EQ(one.standard_error, 0.0);
  EXPECT_TRUE(std::isnan(eval::summarize({}).mean));
}

TEST(Metrics, RelativeGap) {
  EXPECT_DOUBLE_EQ(eval::relative_cost_gap(10.0, 8.0), 0.2);
  EXPECT_DOUBLE_EQ(eval::relative_cost_gap(-4.0, -5.0), -0.25);
  EXPECT_DOUBLE_EQ(eval::relative_cost_gap(3.0, 3.0), 0.0);
  EXPECT_THROW(eval::relative_cost_gap(0.0, 1.0), std::domain_error);
}

TEST(Metrics, AggregateGroupsAndSkipsFailures) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<eval::EpisodeRecord> rs{
      record(eval::Method::kBaseline, 5, 0, 4.0, nan), record(eval::Method::kBaseline, 5, 1, 6.0, nan),
      record(eval::Method::kContingency, 5, 0, 3.0, 2.0), record(eval::Method::kContingency, 5, 1, 100.0, 1.0, false),
      record(eval::Method::kContingency, 0, 0, 1.0, 1.0)};
  const auto rows = eval::aggregate(rs);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].method, eval::Method::kContingency);
  EXPECT_EQ(rows[0].branching_time, 0);
  EXPECT_EQ(rows[1].branching_time, 5);
  EXPECT_EQ(rows[1].episodes, 2);
  EXPECT_EQ(rows[1].failures, 1);
  EXPECT_DOUBLE_EQ(rows[1].open_loop_cost.mean, 3.0);
  EXPECT_EQ(rows[2].method, eval::Method::kBaseline);
  EXPECT_DOUBLE_EQ(rows[2].open_loop_cost.mean, 5.0);
  EXPECT_EQ(rows[2].closed_loop_cost.count, 0);
}

TEST(Metrics, PairedGapsMatchOnInitialConditionAndHypothesis) {
  std::vector<eval::EpisodeRecord> rs{
      record(eval::Method::kBaseline, 5, 0, 10.0, 20.0), record(eval::Method::kContingency, 5, 0, 8.0, 15.0),
      record(eval::Method::kBaseline, 5, 1, 10.0, 20.0), record(eval::Method::kContingency, 5, 1, 8.0, 15.0, false),
      record(eval::Method::kContingency, 5, 2, 8.0, 15.0), record(eval::Method::kBaseline, 5, 3, 0.0, 0.0),
      record(eval::Method::kContingency, 5, 3, 1.0, 1.0)};
  const auto open = eval::paired_gaps(rs, false);
  ASSERT_EQ(open.size(), 1u);
  EXPECT_EQ(open[0].initial_condition, 0);
  EXPECT_DOUBLE_EQ(open[0].gap, 0.2);
  const auto closed = eval::paired_gaps(rs, true);
  ASSERT_EQ(closed.size(), 1u);
  EXPECT_DOUBLE_EQ(closed[0].gap, 0.25);
  auto other_hypothesis = rs;
  other_hypothesis[1].realized_hypothesis = "merge";
  EXPECT_TRUE(eval::paired_gaps(other_hypothesis, false).empty());
  const auto summary = eval::summarize_gaps(open);
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_DOUBLE_EQ(summary[0].gap.mean, 0.2);
}

TEST(Csv, FieldQuoting) {
  EXPECT_EQ(eval::csv_field("plain"), "plain");
  EXPECT_EQ(eval::csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(eval::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(eval::csv_field("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(eval::csv_field(""), "");
}

TEST(Csv, RecordsCarryProvenanceOnEveryRow) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<eval::EpisodeRecord> rs{record(eval::Method::kBaseline, 5, 0, 1.5, nan),
                                      record(eval::Method::kContingency, 5, 0, 1.0, 2.0)};
  rs[1].status = "converged, really";
  std::ostringstream os;
  eval::write_records_csv(os, rs, {"abc123", "1.0.0", 7, "sweep-open"});
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 3u);
  EXPECT_EQ(ls[0].rfind("columns_version,config_hash,version,seed,kind,scenario,method", 0), 0u);
  EXPECT_EQ(ls[1].rfind("1,abc123,1.0.0,7,sweep-open,overtaking,baseline,5,0,", 0), 0u);
  EXPECT_NE(ls[1].find(",nan,"), std::string::npos);
  EXPECT_NE(ls[2].find("\"converged, really\""), std::string::npos);
}

TEST(Csv, SummaryJsonHasRowsAndGaps) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<eval::EpisodeRecord> rs{record(eval::Method::kBaseline, 5, 0, 10.0, nan),
                                      record(eval::Method::kContingency, 5, 0, 9.0, nan)};
  std::ostringstream os;
  eval::write_summary_json(os, eval::aggregate(rs), eval::summarize_gaps(eval::paired_gaps(rs, false)),
                           {"h", "v", 1, "sweep-open"});
  const auto j = nlohmann::json::parse(os.str());
  EXPECT_EQ(j["provenance"]["config_hash"], "h");
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_TRUE(j["rows"][0]["closed_loop_cost"]["mean"].is_null());
  EXPECT_NEAR(j["relative_gap"][0]["gap"]["mean"].get<double>(), 0.1, 1e-15);
}

TEST(Sweep, ReducedKeepsEndpointsAndOrder) {
  const auto full = eval::SweepSpec::from_config(sc::default_config(sc::ScenarioId::kOvertaking));
  ASSERT_EQ(full.positions.size(), 70u);
  EXPECT_EQ(full.branching_times, (std::vector<int>{0, 5, 10, 15, 20, 25}));
  const auto r = full.reduced(20);
  ASSERT_EQ(r.positions.size(), 20u);
  EXPECT_EQ(r.positions.front(), full.positions.front());
  EXPECT_EQ(r.positions.back(), full.positions.back());
  EXPECT_EQ(full.reduced(100).positions.size(), 70u);
  EXPECT_EQ(full.reduced(1).positions.size(), 1u);
  EXPECT_THROW(full.reduced(0), std::invalid_argument);
}

TEST(Sweep, ValidateRejectsBadSpecs) {
  auto s = eval::SweepSpec::from_config(sc::default_config(sc::ScenarioId::kJaywalking));
  s.branching_times = {30};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.branching_times = {5};
  s.workers = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.workers = 1;
  s.verify_tolerance = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.verify_tolerance = 1e-6;
  s.positions.clear();
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Sweep, OpenLoopGapVanishesAtHorizon) {
  const auto spec = small_sweep(sc::ScenarioId::kOvertaking, {10, 25});
  const auto records = eval::run_open_loop(spec);
  ASSERT_EQ(records.size(), 4u);
  for (const auto& r : records) {
    EXPECT_TRUE(r.converged) << r.status;
    EXPECT_TRUE(r.verified);
  }
  for (const auto& g : eval::paired_gaps(records, false)) {
    if (g.branching_time == 25) EXPECT_NEAR(g.gap, 0.0, 1e-12);
    if (g.branching_time == 10) EXPECT_GE(g.gap, -1e-9);
  }
}

TEST(Sweep, ClosedLoopReplanningReproducesThePlanCost) {
  for (auto id : {sc::ScenarioId::kJaywalking, sc::ScenarioId::kOvertaking}) {
    auto spec = small_sweep(id, {5, 15});
    spec.methods = {eval::Method::kContingency};
    const auto records = eval::run_closed_loop(spec);
    ASSERT_EQ(records.size(), 2u);
    for (const auto& r : records) {
      ASSERT_TRUE(r.converged) << r.status;
      EXPECT_TRUE(r.verified);
      EXPECT_LE(std::abs(r.closed_loop_cost - r.open_loop_cost), 1e-5 * (1.0 + std::abs(r.open_loop_cost)));
      EXPECT_GE(r.min_constraint, -1e-6);
    }
  }
}

TEST(Sweep, SampledRealizationIsSeeded) {
  auto spec = small_sweep(sc::ScenarioId::kJaywalking, {10});
  spec.realization = eval::Realization::kSampled;
  spec.seed = 42;
  const auto a = eval::run_closed_loop(spec);
  const auto b = eval::run_closed_loop(spec);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_NE(a[k].realized_hypothesis, "expected");
    EXPECT_EQ(a[k].realized_hypothesis, b[k].realized_hypothesis);
    EXPECT_DOUBLE_EQ(a[k].closed_loop_cost, b[k].closed_loop_cost);
  }
}

TEST(Replanning, RemainingGameStartsWhereThePlanBranches) {
  const auto g = sc::build_game(sc::default_config(sc::ScenarioId::kJaywalking));
  const auto plan = game::solve_contingency_game(g);
  ASSERT_TRUE(plan.converged());
  const auto tail = eval::remaining_game(g, plan.profile, 1, g.branching_time);
  EXPECT_EQ(tail.num_hypotheses(), 1);
  EXPECT_EQ(tail.horizon, g.horizon - g.branching_time);
  EXPECT_TRUE(tail.ego.initial_state.isApprox(plan.profile.at(1, 0).states.col(g.branching_time)));
  const auto episode = eval::execute_with_replanning(g, plan, 1, g.branching_time, {});
  ASSERT_TRUE(episode.replanned);
  EXPECT_TRUE(episode.replan.converged());
  EXPECT_EQ(episode.profile.at(0, 0).controls.cols(), g.horizon);
  const double gap = (episode.profile.at(0, 0).controls - plan.profile.at(1, 0).controls).cwiseAbs().maxCoeff();
  EXPECT_LT(gap, 1e-5);
}

TEST(Replanning, DistanceHelpers) {
  const auto g = sc::build_game(sc::default_config(sc::ScenarioId::kOvertaking));
  const auto profile = game::zero_control_profile(g);
  // Zero controls keep the initial spacing: ego at 0, human at 16, lead at 30,
  // all moving, so the closest agent stays the human.
  EXPECT_GT(eval::mean_opponent_distance(g, profile, 0), 0.0);
  EXPECT_TRUE(std::isfinite(eval::min_shared_constraint(g, profile)));
}
