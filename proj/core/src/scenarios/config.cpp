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

#include "cgames/scenarios/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cgames::scenarios {

using nlohmann::json;

const char* to_string(ScenarioId id) { return id == ScenarioId::kJaywalking ? "jaywalking" : "overtaking"; }

namespace {

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

void require(bool ok, const std::string& what) {
  if (!ok) fail(what);
}

// Reads the keys of one JSON object and rejects keys that were not consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_ + ": expected an object");
  }
  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;
  ~ObjectReader() = default;

  bool has(const std::string& key) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    return true;
  }
  const json& at(const std::string& key) const { return j_.at(key); }
  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    require(at(key).is_number(), where(key) + ": expected a number");
    out = at(key).get<double>();
  }
  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    require(at(key).is_number_integer(), where(key) + ": expected an integer");
    out = at(key).get<int>();
  }
  void vec4(const std::string& key, Eigen::Vector4d& out) {
    if (!has(key)) return;
    const auto v = numbers(at(key), where(key));
    require(v.size() == 4, where(key) + ": expected 4 numbers");
    out = Eigen::Vector4d(v[0], v[1], v[2], v[3]);
  }
  void number_list(const std::string& key, std::vector<double>& out) {
    if (has(key)) out = numbers(at(key), where(key));
  }
  void integer_list(const std::string& key, std::vector<int>& out) {
    if (!has(key)) return;
    require(at(key).is_array(), where(key) + ": expected an array");
    out.clear();
    for (const auto& e : at(key)) {
      require(e.is_number_integer(), where(key) + ": expected integers");
      out.push_back(e.get<int>());
    }
  }
  void string_list(const std::string& key, std::vector<std::string>& out) {
    if (!has(key)) return;
    require(at(key).is_array(), where(key) + ": expected an array");
    out.clear();
    for (const auto& e : at(key)) {
      require(e.is_string(), where(key) + ": expected strings");
      out.push_back(e.get<std::string>());
    }
  }
  void number_map(const std::string& key, std::map<std::string, double>& out) {
    if (!has(key)) return;
    require(at(key).is_object(), where(key) + ": expected an object");
    out.clear();
    for (auto it = at(key).begin(); it != at(key).end(); ++it) {
      require(it.value().is_number(), where(key) + "." + it.key() + ": expected a number");
      out[it.key()] = it.value().get<double>();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail("unknown configuration key '" + where(it.key()) + "'");
    }
  }

 private:
  static std::vector<double> numbers(const json& j, const std::string& where) {
    require(j.is_array(), where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : j) {
      require(e.is_number(), where + ": expected numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_car(ObjectReader& parent, const std::string& key, CarAgent& car, bool with_lane) {
  if (!parent.has(key)) return;
  ObjectReader r(parent.at(key), parent.where(key));
  r.vec4("initial_state", car.initial_state);
  if (with_lane) r.number("target_lane", car.target_lane);
  r.number("reference_velocity", car.reference_velocity);
  r.finish();
}

json car_json(const CarAgent& car, bool with_lane) {
  json j;
  j["initial_state"] = {car.initial_state[0], car.initial_state[1], car.initial_state[2], car.initial_state[3]};
  if (with_lane) j["target_lane"] = car.target_lane;
  j["reference_velocity"] = car.reference_velocity;
  return j;
}

}  // namespace

void ScenarioConfig::validate() const {
  require(schema_version == kSchemaVersion, "unsupported schema_version " + std::to_string(schema_version));
  require(timestep > 0.0, "timestep must be positive");
  require(horizon >= 1, "horizon must be at least 1");
  require(branching_time >= 0 && branching_time <= horizon, "branching_time must lie in [0, horizon]");
  require(!hypotheses.empty(), "at least one hypothesis is required");
  require(std::set<std::string>(hypotheses.begin(), hypotheses.end()).size() == hypotheses.size(),
          "hypothesis labels must be unique");
  require(belief.size() == hypotheses.size(), "belief needs one probability per hypothesis");
  double total = 0.0;
  for (double p : belief) {
    require(p >= 0.0 && std::isfinite(p), "belief probabilities must be nonnegative");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "belief probabilities must sum to one");
  require(lse_sharpness > 0.0, "lse_sharpness must be positive");
  for (double w : {pedestrian_weights.goal, pedestrian_weights.velocity, pedestrian_weights.acceleration, car_weights.lane,
                   car_weights.progress, car_weights.velocity, car_weights.heading, car_weights.acceleration,
                   car_weights.steering}) {
    require(w >= 0.0 && std::isfinite(w), "cost weights must be nonnegative");
  }
  try {
    pedestrian_bounds.validate();
    car_bounds.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  require(collision.length > 0.0 && collision.width > 0.0, "collision box scales must be positive");
  require(multiplier_ratio > 0.0, "multiplier_ratio must be positive");
  require(ego.initial_state.allFinite(), "ego initial state must be finite");
  if (scenario == ScenarioId::kJaywalking) {
    require(jaywalking.pedestrian_initial_state.allFinite(), "pedestrian initial state must be finite");
    for (const auto& h : hypotheses) {
      require(jaywalking.goal_lateral.count(h) == 1, "jaywalking.goal_lateral has no entry for '" + h + "'");
    }
  } else {
    require(overtaking.left_lane != overtaking.right_lane, "overtaking lanes must differ");
    require(overtaking.human_lead_ratio > 0.0, "overtaking.human_lead_ratio must be positive");
    for (const auto& h : hypotheses) {
      require(overtaking.human_target_lane.count(h) == 1,
              "overtaking.human_target_lane has no entry for '" + h + "'");
    }
  }
  require(grid.n1 >= 1 && grid.n2 >= 1, "grid sizes must be positive");
  for (int t : grid.branching_times) require(t >= 0 && t <= horizon, "grid branching times must lie in [0, horizon]");
}

ScenarioConfig default_config(ScenarioId id) {
  ScenarioConfig c;
  c.scenario = id;
  if (id == ScenarioId::kJaywalking) {
    c.hypotheses = {"left", "right"};
    c.belief = {0.5, 0.5};
    c.multiplier_ratio = 10.0;
    c.collision = {3.0, 2.0};
    c.ego.initial_state = Eigen::Vector4d(0.0, 0.0, 6.0, 0.0);
    c.ego.target_lane = 0.0;
    c.ego.reference_velocity = 8.0;
    c.pedestrian_bounds.v_min = -1.0;
    c.pedestrian_bounds.v_max = 1.0;
    c.jaywalking.pedestrian_initial_state = Eigen::Vector4d(20.0, 0.0, 0.0, 0.0);
    c.grid.p1_min = 19.0;
    c.grid.p1_max = 28.0;
    c.grid.p2_min = -1.5;
    c.grid.p2_max = 1.5;
  } else {
    c.hypotheses = {"merge", "stay"};
    c.belief = {0.5, 0.5};
    c.multiplier_ratio = 1000.0;
    c.collision = {5.0, 2.5};
    c.ego.initial_state = Eigen::Vector4d(0.0, 0.0, 6.0, 0.0);
    c.ego.target_lane = 3.5;
    c.ego.reference_velocity = 10.0;
    c.overtaking.human.initial_state = Eigen::Vector4d(16.0, 0.0, 6.0, 0.0);
    c.overtaking.human.reference_velocity = 6.0;
    c.overtaking.human_target_lane = {{"merge", 3.5}, {"stay", 0.0}};
    c.overtaking.lead.initial_state = Eigen::Vector4d(30.0, 0.0, 5.0, 0.0);
    c.overtaking.lead.target_lane = 0.0;
    c.overtaking.lead.reference_velocity = 5.0;
    c.grid.p1_min = 14.0;
    c.grid.p1_max = 23.0;
    c.grid.p2_min = -0.6;
    c.grid.p2_max = 0.6;
  }
  c.validate();
  return c;
}

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  ObjectReader root(j, "");
  require(root.has("schema_version"), "schema_version is required");
  require(root.at("schema_version").is_number_integer(), "schema_version: expected an integer");
  const int version = root.at("schema_version").get<int>();
  require(version == kSchemaVersion, "unsupported schema_version " + std::to_string(version));
  require(root.has("scenario") && root.at("scenario").is_string(), "scenario is required");
  const std::string name = root.at("scenario").get<std::string>();
  ScenarioId id;
  if (name == "jaywalking") {
    id = ScenarioId::kJaywalking;
  } else if (name == "overtaking") {
    id = ScenarioId::kOvertaking;
  } else {
    fail("unknown scenario '" + name + "'");
  }
  ScenarioConfig c = default_config(id);
  root.number("timestep", c.timestep);
  root.integer("horizon", c.horizon);
  root.integer("branching_time", c.branching_time);
  root.string_list("hypotheses", c.hypotheses);
  root.number_list("belief", c.belief);
  root.number("lse_sharpness", c.lse_sharpness);
  root.number("multiplier_ratio", c.multiplier_ratio);
  if (root.has("weights")) {
    ObjectReader w(root.at("weights"), "weights");
    if (w.has("pedestrian")) {
      ObjectReader p(w.at("pedestrian"), "weights.pedestrian");
      p.number("goal", c.pedestrian_weights.goal);
      p.number("velocity", c.pedestrian_weights.velocity);
      p.number("acceleration", c.pedestrian_weights.acceleration);
      p.finish();
    }
    if (w.has("car")) {
      ObjectReader p(w.at("car"), "weights.car");
      p.number("lane", c.car_weights.lane);
      p.number("progress", c.car_weights.progress);
      p.number("velocity", c.car_weights.velocity);
      p.number("heading", c.car_weights.heading);
      p.number("acceleration", c.car_weights.acceleration);
      p.number("steering", c.car_weights.steering);
      p.finish();
    }
    w.finish();
  }
  if (root.has("bounds")) {
    ObjectReader b(root.at("bounds"), "bounds");
    if (b.has("pedestrian")) {
      ObjectReader p(b.at("pedestrian"), "bounds.pedestrian");
      p.number("v_min", c.pedestrian_bounds.v_min);
      p.number("v_max", c.pedestrian_bounds.v_max);
      p.number("a_min", c.pedestrian_bounds.a_min);
      p.number("a_max", c.pedestrian_bounds.a_max);
      p.finish();
    }
    if (b.has("car")) {
      ObjectReader p(b.at("car"), "bounds.car");
      p.number("v_min", c.car_bounds.v_min);
      p.number("v_max", c.car_bounds.v_max);
      p.number("a_min", c.car_bounds.a_min);
      p.number("a_max", c.car_bounds.a_max);
      p.number("omega_min", c.car_bounds.omega_min);
      p.number("omega_max", c.car_bounds.omega_max);
      p.finish();
    }
    b.finish();
  }
  if (root.has("collision")) {
    ObjectReader r(root.at("collision"), "collision");
    r.number("length", c.collision.length);
    r.number("width", c.collision.width);
    r.finish();
  }
  read_car(root, "ego", c.ego, true);
  if (id == ScenarioId::kJaywalking && root.has("jaywalking")) {
    ObjectReader r(root.at("jaywalking"), "jaywalking");
    r.vec4("pedestrian_initial_state", c.jaywalking.pedestrian_initial_state);
    r.number_map("goal_lateral", c.jaywalking.goal_lateral);
    r.number("goal_longitudinal_offset", c.jaywalking.goal_longitudinal_offset);
    r.finish();
  }
  if (id == ScenarioId::kOvertaking && root.has("overtaking")) {
    ObjectReader r(root.at("overtaking"), "overtaking");
    r.number("right_lane", c.overtaking.right_lane);
    r.number("left_lane", c.overtaking.left_lane);
    read_car(r, "human", c.overtaking.human, false);
    r.number_map("human_target_lane", c.overtaking.human_target_lane);
    read_car(r, "lead", c.overtaking.lead, true);
    r.number("human_lead_ratio", c.overtaking.human_lead_ratio);
    r.finish();
  }
  if (root.has("grid")) {
    ObjectReader r(root.at("grid"), "grid");
    r.number("p1_min", c.grid.p1_min);
    r.number("p1_max", c.grid.p1_max);
    r.number("p2_min", c.grid.p2_min);
    r.number("p2_max", c.grid.p2_max);
    r.integer("n1", c.grid.n1);
    r.integer("n2", c.grid.n2);
    r.integer_list("branching_times", c.grid.branching_times);
    r.finish();
  }
  // Provenance written by the tools is metadata; it does not change the config.
  if (root.has("provenance")) require(root.at("provenance").is_object(), "provenance: expected an object");
  root.finish();
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read configuration file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["scenario"] = to_string(c.scenario);
  j["timestep"] = c.timestep;
  j["horizon"] = c.horizon;
  j["branching_time"] = c.branching_time;
  j["hypotheses"] = c.hypotheses;
  j["belief"] = c.belief;
  j["lse_sharpness"] = c.lse_sharpness;
  j["multiplier_ratio"] = c.multiplier_ratio;
  j["weights"]["pedestrian"] = {{"goal", c.pedestrian_weights.goal},
                                {"velocity", c.pedestrian_weights.velocity},
                                {"acceleration", c.pedestrian_weights.acceleration}};
  j["weights"]["car"] = {{"lane", c.car_weights.lane},
                         {"progress", c.car_weights.progress},
                         {"velocity", c.car_weights.velocity},
                         {"heading", c.car_weights.heading},
                         {"acceleration", c.car_weights.acceleration},
                         {"steering", c.car_weights.steering}};
  j["bounds"]["pedestrian"] = {{"v_min", c.pedestrian_bounds.v_min},
                               {"v_max", c.pedestrian_bounds.v_max},
                               {"a_min", c.pedestrian_bounds.a_min},
                               {"a_max", c.pedestrian_bounds.a_max}};
  j["bounds"]["car"] = {{"v_min", c.car_bounds.v_min},         {"v_max", c.car_bounds.v_max},
                        {"a_min", c.car_bounds.a_min},         {"a_max", c.car_bounds.a_max},
                        {"omega_min", c.car_bounds.omega_min}, {"omega_max", c.car_bounds.omega_max}};
  j["collision"] = {{"length", c.collision.length}, {"width", c.collision.width}};
  j["ego"] = car_json(c.ego, true);
  if (c.scenario == ScenarioId::kJaywalking) {
    const auto& p = c.jaywalking.pedestrian_initial_state;
    j["jaywalking"] = {{"pedestrian_initial_state", {p[0], p[1], p[2], p[3]}},
                       {"goal_lateral", c.jaywalking.goal_lateral},
                       {"goal_longitudinal_offset", c.jaywalking.goal_longitudinal_offset}};
  } else {
    j["overtaking"] = {{"right_lane", c.overtaking.right_lane},
                       {"left_lane", c.overtaking.left_lane},
                       {"human", car_json(c.overtaking.human, false)},
                       {"human_target_lane", c.overtaking.human_target_lane},
                       {"lead", car_json(c.overtaking.lead, true)},
                       {"human_lead_ratio", c.overtaking.human_lead_ratio}};
  }
  j["grid"] = {{"p1_min", c.grid.p1_min}, {"p1_max", c.grid.p1_max},       {"p2_min", c.grid.p2_min},
               {"p2_max", c.grid.p2_max}, {"n1", c.grid.n1},               {"n2", c.grid.n2},
               {"branching_times", c.grid.branching_times}};
  return j.dump(2);
}

std::string apply_overrides(const std::string& json_text, const std::vector<std::string>& overrides) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    require(eq != std::string::npos && eq > 0, "override '" + item + "' must have the form key=value");
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    json* node = &j;
    std::stringstream path(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(path, part, '.')) parts.push_back(part);
    require(!parts.empty(), "override '" + item + "' has an empty key");
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
      require(node->is_object(), "override '" + key + "' descends into a non-object");
      node = &(*node)[parts[k]];
      if (node->is_null()) *node = json::object();
    }
    require(node->is_object(), "override '" + key + "' descends into a non-object");
    (*node)[parts.back()] = value;
  }
  return j.dump(2);
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string text = json::parse(config_to_json(config)).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace cgames::scenarios
