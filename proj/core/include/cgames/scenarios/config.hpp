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

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgames/dynamics/dynamics.hpp"

namespace cgames::scenarios {

inline constexpr int kSchemaVersion = 1;

enum class ScenarioId { kJaywalking, kOvertaking };

const char* to_string(ScenarioId id);

/// Raised for malformed or inconsistent scenario configurations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PedestrianWeights {
  double goal = 1.0;
  double velocity = 0.1;
  double acceleration = 0.1;
};

struct CarWeights {
  double lane = 1.0;
  double progress = 1.0;
  double velocity = 0.1;
  double heading = 0.5;
  double acceleration = 0.1;
  double steering = 0.5;
};

/// Obstacle box scales: n_top/n_bottom = (+-1/length, 0), n_side = (0, +-1/width).
struct CollisionBox {
  double length = 3.0;
  double width = 2.0;
};

/// A car: initial state (p1, p2, v, psi), preferred lane (p2) and speed.
struct CarAgent {
  Eigen::Vector4d initial_state = Eigen::Vector4d::Zero();
  double target_lane = 0.0;
  double reference_velocity = 0.0;
};

struct JaywalkingSetup {
  /// Pedestrian state (p1, p2, v1, v2).
  Eigen::Vector4d pedestrian_initial_state{15.0, 0.0, 0.0, 0.0};
  /// Goal p2 per hypothesis label; goal p1 is the initial p1 plus the offset.
  std::map<std::string, double> goal_lateral{{"left", 4.0}, {"right", -4.0}};
  double goal_longitudinal_offset = 0.0;
};

struct OvertakingSetup {
  double right_lane = 0.0;
  double left_lane = 3.5;
  CarAgent human;
  /// Human target lane per hypothesis label.
  std::map<std::string, double> human_target_lane;
  CarAgent lead;
  /// Ratio of the human's multiplier to the lead's on their shared constraint.
  double human_lead_ratio = 1000.0;
};

/// Initial-position grid of the swept agent (pedestrian or human car).
struct SweepGrid {
  double p1_min = 0.0;
  double p1_max = 0.0;
  double p2_min = 0.0;
  double p2_max = 0.0;
  int n1 = 10;
  int n2 = 7;
  std::vector<int> branching_times{0, 5, 10, 15, 20, 25};
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  ScenarioId scenario = ScenarioId::kJaywalking;
  double timestep = 0.2;
  int horizon = 25;
  int branching_time = 10;
  std::vector<std::string> hypotheses;
  std::vector<double> belief;
  double lse_sharpness = 20.0;
  PedestrianWeights pedestrian_weights;
  CarWeights car_weights;
  dynamics::PointMassParams pedestrian_bounds;
  dynamics::UnicycleParams car_bounds;
  CollisionBox collision;
  /// Ego multiplier relative to the other participant on shared constraints.
  double multiplier_ratio = 10.0;
  CarAgent ego;
  JaywalkingSetup jaywalking;
  OvertakingSetup overtaking;
  SweepGrid grid;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

ScenarioConfig default_config(ScenarioId id);

/// Strict JSON parsing: unknown keys, a missing or unsupported
/// schema_version and type mismatches raise ConfigError. Keys that are
/// absent keep their defaults for the named scenario. An optional top-level
/// "provenance" object is accepted and ignored.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
std::string config_to_json(const ScenarioConfig& config);

/// Applies "dotted.key=value" overrides to a JSON config text. The value
/// is parsed as JSON when possible and used as a string otherwise.
std::string apply_overrides(const std::string& json_text, const std::vector<std::string>& overrides);

/// FNV-1a hash of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

}  // namespace cgames::scenarios
