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
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cgames/game/solve.hpp"
#include "cgames/scenarios/builders.hpp"
#include "cgames/scenarios/collision.hpp"
#include "cgames/scenarios/config.hpp"

namespace sc = cgames::scenarios;
namespace game = cgames::game;
using nlohmann::json;

namespace {

const sc::ScenarioId kBoth[] = {sc::ScenarioId::kJaywalking, sc::ScenarioId::kOvertaking};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string default_json(sc::ScenarioId id) { return sc::config_to_json(sc::default_config(id)); }

std::string edited(sc::ScenarioId id, const std::function<void(json&)>& edit) {
  json j = json::parse(default_json(id));
  edit(j);
  return j.dump();
}

// Value of the ego-other collision constraint with the other agent at the
// origin and the ego at `offset`.
double pair_constraint(const game::SharedConstraintSpec& spec, const Eigen::Vector2d& offset) {
  std::vector<double> z(static_cast<std::size_t>(spec.fn->input_dim()), 0.0);
  z[0] = offset[0];
  z[1] = offset[1];
  double out = 0.0;
  spec.fn->evaluate(z, std::span<double>(&out, 1));
  return out;
}

}  // namespace

TEST(Config, DefaultsValidateAndBuild) {
  for (auto id : kBoth) {
    const auto c = sc::default_config(id);
    EXPECT_NO_THROW(c.validate());
    const auto g = sc::build_game(c);
    EXPECT_EQ(g.num_hypotheses(), 2);
    EXPECT_EQ(g.horizon, 25);
    const int players = id == sc::ScenarioId::kJaywalking ? 2 : 3;
    for (int theta = 0; theta < 2; ++theta) EXPECT_EQ(g.num_players(theta), players);
  }
}

TEST(Config, ShippedDataMatchesDefaults) {
  for (auto id : kBoth) {
    const std::string path = std::string(CGAMES_DATA_DIR) + "/" + sc::to_string(id) + ".json";
    const auto loaded = sc::load_config(path);
    EXPECT_EQ(sc::config_hash(loaded), sc::config_hash(sc::default_config(id))) << path;
  }
}

TEST(Config, JsonRoundTripKeepsHash) {
  for (auto id : kBoth) {
    const auto c = sc::default_config(id);
    const auto again = sc::parse_config(sc::config_to_json(c));
    EXPECT_EQ(sc::config_hash(again), sc::config_hash(c));
    EXPECT_EQ(sc::config_to_json(again), sc::config_to_json(c));
  }
}

TEST(Config, HashIsStableAndSensitive) {
  const auto c = sc::default_config(sc::ScenarioId::kOvertaking);
  const std::string h = sc::config_hash(c);
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(h.find_first_not_of("0123456789abcdef"), std::string::npos);
  EXPECT_EQ(sc::config_hash(c), h);
  auto changed = c;
  changed.branching_time = 11;
  EXPECT_NE(sc::config_hash(changed), h);
}

TEST(Config, RejectsUnknownKeys) {
  const auto id = sc::ScenarioId::kJaywalking;
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["speed_limit"] = 3; })), sc::ConfigError);
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["ego"]["mass"] = 3; })), sc::ConfigError);
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["overtaking"] = json::object(); })), sc::ConfigError);
}

TEST(Config, RejectsBadVersionsAndTypes) {
  const auto id = sc::ScenarioId::kOvertaking;
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j.erase("schema_version"); })), sc::ConfigError);
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["schema_version"] = 99; })), sc::ConfigError);
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["horizon"] = "long"; })), sc::ConfigError);
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["scenario"] = "roundabout"; })), sc::ConfigError);
  EXPECT_THROW(sc::parse_config("{not json"), sc::ConfigError);
}

TEST(Config, RejectsInconsistentValues) {
  const auto id = sc::ScenarioId::kJaywalking;
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["belief"] = {0.3, 0.3}; })), sc::ConfigError);
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["belief"] = {1.2, -0.2}; })), sc::ConfigError);
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["branching_time"] = 40; })), sc::ConfigError);
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["weights"]["car"]["lane"] = -1.0; })), sc::ConfigError);
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["timestep"] = 0.0; })), sc::ConfigError);
}

TEST(Config, AbsentKeysKeepScenarioDefaults) {
  const auto c = sc::parse_config(R"({"schema_version": 1, "scenario": "overtaking", "horizon": 20,
                                      "grid": {"branching_times": [0, 10, 20]}})");
  auto expected = sc::default_config(sc::ScenarioId::kOvertaking);
  expected.horizon = 20;
  expected.grid.branching_times = {0, 10, 20};
  EXPECT_EQ(sc::config_hash(c), sc::config_hash(expected));
}

TEST(Config, ProvenanceBlockIsIgnored) {
  const auto id = sc::ScenarioId::kJaywalking;
  const auto c = sc::parse_config(edited(id, [](json& j) { j["provenance"] = {{"config_hash", "x"}}; }));
  EXPECT_EQ(sc::config_hash(c), sc::config_hash(sc::default_config(id)));
  EXPECT_THROW(sc::parse_config(edited(id, [](json& j) { j["provenance"] = 3; })), sc::ConfigError);
}

TEST(Config, OverridesEditNestedKeys) {
  const std::string text = sc::apply_overrides(
      default_json(sc::ScenarioId::kJaywalking),
      {"horizon=12", "branching_time=6", "grid.branching_times=[0,6,12]", "belief=[0.25,0.75]", "ego.reference_velocity=7.5", "jaywalking.pedestrian_initial_state=[21,0.5,0,0]"});
  const auto c = sc::parse_config(text);
  EXPECT_EQ(c.horizon, 12);
  EXPECT_DOUBLE_EQ(c.belief[1], 0.75);
  EXPECT_DOUBLE_EQ(c.ego.reference_velocity, 7.5);
  EXPECT_DOUBLE_EQ(c.jaywalking.pedestrian_initial_state[1], 0.5);
  EXPECT_THROW(sc::apply_overrides(default_json(sc::ScenarioId::kJaywalking), {"horizon"}), sc::ConfigError);
  EXPECT_THROW(sc::apply_overrides(default_json(sc::ScenarioId::kJaywalking), {"horizon.x=1"}), sc::ConfigError);
  // A string value for a numeric key survives the override but not parsing.
  EXPECT_THROW(sc::parse_config(sc::apply_overrides(default_json(sc::ScenarioId::kJaywalking), {"horizon=abc"})),
               sc::ConfigError);
}

TEST(Grid, PositionsArePMajorAndCoverTheBox) {
  const auto c = sc::default_config(sc::ScenarioId::kOvertaking);
  const auto pts = sc::grid_positions(c.grid);
  ASSERT_EQ(pts.size(), 70u);
  EXPECT_DOUBLE_EQ(pts.front()[0], c.grid.p1_min);
  EXPECT_DOUBLE_EQ(pts.front()[1], c.grid.p2_min);
  EXPECT_DOUBLE_EQ(pts.back()[0], c.grid.p1_max);
  EXPECT_DOUBLE_EQ(pts.back()[1], c.grid.p2_max);
  EXPECT_DOUBLE_EQ(pts[1][0], c.grid.p1_min);
  EXPECT_GT(pts[1][1], pts[0][1]);
}

TEST(Grid, SweptPositionMovesTheRightAgent) {
  const auto jw = sc::with_swept_position(sc::default_config(sc::ScenarioId::kJaywalking), 23.0, -1.0);
  EXPECT_DOUBLE_EQ(jw.jaywalking.pedestrian_initial_state[0], 23.0);
  EXPECT_DOUBLE_EQ(jw.jaywalking.pedestrian_initial_state[1], -1.0);
  const auto ot = sc::with_swept_position(sc::default_config(sc::ScenarioId::kOvertaking), 18.0, 0.3);
  EXPECT_DOUBLE_EQ(ot.overtaking.human.initial_state[0], 18.0);
  EXPECT_DOUBLE_EQ(ot.overtaking.human.initial_state[1], 0.3);
  EXPECT_DOUBLE_EQ(sc::build_game(ot).others[0][0].initial_state[0], 18.0);
}

TEST(Lse, BoundsTheMaximum) {
  const std::vector<double> v{-1.0, 0.3, 0.25, -7.0};
  for (double alpha : {1.0, 5.0, 20.0, 200.0}) {
    const double s = sc::lse_smooth_max(v, alpha);
    EXPECT_GE(s, 0.3);
    EXPECT_LE(s, 0.3 + std::log(4.0) / alpha + 1e-15);
  }
  EXPECT_NEAR(sc::lse_smooth_max(std::vector<double>{1e4, 1e4 - 1.0}, 20.0), 1e4, 1e-8);
  EXPECT_THROW(sc::lse_smooth_max(std::vector<double>{}, 1.0), std::invalid_argument);
  EXPECT_THROW(sc::lse_smooth_max(std::vector<double>{1.0}, 0.0), std::invalid_argument);
}

TEST(Collision, BoxOpenSideAndBlockedSide) {
  const auto g = sc::CollisionGeometry::box(3.0, 2.0, 1);
  const double alpha = 20.0;
  EXPECT_LT(sc::collision_constraint(Eigen::Vector2d(0.0, 0.0), g, alpha), 0.0);
  EXPECT_GT(sc::collision_constraint(Eigen::Vector2d(5.0, 0.0), g, alpha), 0.0);
  EXPECT_GT(sc::collision_constraint(Eigen::Vector2d(-5.0, 0.0), g, alpha), 0.0);
  EXPECT_GT(sc::collision_constraint(Eigen::Vector2d(0.0, -3.0), g, alpha), 0.0);
  // Lateral clearance on the blocked side does not count.
  EXPECT_LT(sc::collision_constraint(Eigen::Vector2d(0.0, 3.0), g, alpha), 0.0);
  EXPECT_THROW(sc::CollisionGeometry::box(3.0, 2.0, 0), std::invalid_argument);
  EXPECT_THROW(sc::CollisionGeometry::box(-1.0, 2.0, 1), std::invalid_argument);
}

TEST(Collision, JaywalkingEgoPassesBehindThePedestrian) {
  const auto c = sc::default_config(sc::ScenarioId::kJaywalking);
  const auto g = sc::build_game(c);
  for (int theta = 0; theta < 2; ++theta) {
    const double goal_side = c.jaywalking.goal_lateral.at(c.hypotheses[static_cast<std::size_t>(theta)]) > 0 ? 1.0 : -1.0;
    const auto& spec = g.shared_constraints[static_cast<std::size_t>(theta)][0];
    EXPECT_LT(pair_constraint(spec, {0.0, 3.0 * goal_side}), 0.0) << theta;
    EXPECT_GT(pair_constraint(spec, {0.0, -3.0 * goal_side}), 0.0) << theta;
  }
}

TEST(Collision, OvertakingBlocksTheTargetLaneSide) {
  const auto c = sc::default_config(sc::ScenarioId::kOvertaking);
  const auto g = sc::build_game(c);
  const int merge = 0;
  ASSERT_GT(c.overtaking.human_target_lane.at(c.hypotheses[merge]), 0.5 * c.overtaking.left_lane);
  const auto& ego_human = g.shared_constraints[merge][0];
  EXPECT_LT(pair_constraint(ego_human, {0.0, 3.0}), 0.0);
  EXPECT_GT(pair_constraint(ego_human, {0.0, -3.0}), 0.0);
  const auto& ego_lead = g.shared_constraints[merge][1];
  EXPECT_GT(pair_constraint(ego_lead, {0.0, 3.0}), 0.0);
}

TEST(Scenarios, CertainBeliefMatchesSingleHypothesis) {
  for (auto id : kBoth) {
    const auto g = sc::build_game(sc::default_config(id)).with_belief({1.0, 0.0});
    const auto joint = game::solve_contingency_game(g);
    const auto single = game::solve_contingency_game(g.single_hypothesis(0));
    ASSERT_TRUE(joint.converged());
    ASSERT_TRUE(single.converged());
    const double gap = (joint.profile.at(0, 0).controls - single.profile.at(0, 0).controls).cwiseAbs().maxCoeff();
    EXPECT_LT(gap, 1e-5) << sc::to_string(id);
  }
}

TEST(Scenarios, NominalSolvesConvergeWithInteraction) {
  for (auto id : kBoth) {
    const auto g = sc::build_game(sc::default_config(id));
    const auto s = game::solve_contingency_game(g);
    ASSERT_TRUE(s.converged()) << sc::to_string(id);
    double largest = 0.0;
    for (const auto& lambda : s.multipliers.shared) largest = std::max(largest, lambda.maxCoeff());
    EXPECT_GT(largest, 1e-3) << sc::to_string(id);
    EXPECT_TRUE(game::verify_equilibrium(g, s, 1e-6).passed);
  }
}
