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

#include "cgames/game/types.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cgames::game {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void check_bounds(const Eigen::VectorXd& lo, const Eigen::VectorXd& up, int dim, const std::string& what) {
  if (lo.size() != dim || up.size() != dim) fail(what + " bounds must have length " + std::to_string(dim));
  for (int k = 0; k < dim; ++k) {
    if (std::isnan(lo[k]) || std::isnan(up[k]) || !(lo[k] < up[k])) {
      fail(what + " bounds must satisfy lower < upper (component " + std::to_string(k) + ")");
    }
  }
}

}  // namespace

void PlayerSpec::validate() const {
  const std::string who = "player '" + name + "'";
  if (state_dim <= 0 || control_dim <= 0) fail(who + ": dimensions must be positive");
  if (!dynamics) fail(who + ": dynamics missing");
  if (dynamics->input_dim() != stage_dim() || dynamics->output_dim() != state_dim) {
    fail(who + ": dynamics must map (x, u) to a state");
  }
  if (initial_state.size() != state_dim || !initial_state.allFinite()) {
    fail(who + ": initial state must be finite with length " + std::to_string(state_dim));
  }
  check_bounds(state_lower, state_upper, state_dim, who + " state");
  check_bounds(control_lower, control_upper, control_dim, who + " control");
  for (const auto& c : stage_costs) {
    if (!c.fn || c.fn->output_dim() != 1) fail(who + ": stage costs must be scalar functions");
  }
  for (const auto& c : private_constraints) {
    if (!c.fn) fail(who + ": private constraint function missing");
  }
}

void SharedConstraintSpec::validate() const {
  const std::string who = "shared constraint '" + name + "'";
  if (!fn) fail(who + ": function missing");
  if (participants.size() < 2) fail(who + ": needs at least two participants");
  if (multiplier_ratio.size() != participants.size()) fail(who + ": one multiplier ratio per participant");
  for (double k : multiplier_ratio) {
    if (!(k > 0.0) || !std::isfinite(k)) fail(who + ": multiplier ratios must be positive");
  }
  if (std::set<int>(participants.begin(), participants.end()).size() != participants.size()) {
    fail(who + ": participants must be distinct");
  }
}

int Belief::index_of(const std::string& label) const {
  for (int k = 0; k < size(); ++k) {
    if (hypotheses[static_cast<std::size_t>(k)] == label) return k;
  }
  return -1;
}

void Belief::validate() const {
  if (hypotheses.empty()) fail("belief: at least one hypothesis required");
  if (probabilities.size() != hypotheses.size()) fail("belief: one probability per hypothesis");
  if (std::set<std::string>(hypotheses.begin(), hypotheses.end()).size() != hypotheses.size()) {
    fail("belief: hypothesis labels must be unique");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) fail("belief: probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) fail("belief: probabilities must sum to one");
}

Belief Belief::uniform(std::vector<std::string> labels) {
  Belief b;
  const double p = labels.empty() ? 0.0 : 1.0 / static_cast<double>(labels.size());
  b.probabilities.assign(labels.size(), p);
  b.hypotheses = std::move(labels);
  return b;
}

Belief Belief::certain(std::vector<std::string> labels, int index) {
  Belief b;
  b.probabilities.assign(labels.size(), 0.0);
  b.probabilities.at(static_cast<std::size_t>(index)) = 1.0;
  b.hypotheses = std::move(labels);
  return b;
}

const PlayerSpec& ContingencyGame::player(int theta, int index) const {
  if (index == 0) return ego;
  return others.at(static_cast<std::size_t>(theta)).at(static_cast<std::size_t>(index - 1));
}

void ContingencyGame::validate() const {
  if (horizon < 1) fail("game: horizon must be at least 1");
  if (!(timestep > 0.0)) fail("game: timestep must be positive");
  if (branching_time < 0 || branching_time > horizon) fail("game: branching time must lie in [0, horizon]");
  belief.validate();
  const auto k = static_cast<std::size_t>(belief.size());
  if (others.size() != k || shared_constraints.size() != k) {
    fail("game: players and shared constraints must be given for every hypothesis");
  }
  ego.validate();
  for (std::size_t theta = 0; theta < k; ++theta) {
    const int n = num_players(static_cast<int>(theta));
    for (const auto& p : others[theta]) p.validate();
    auto check_term = [&](const StageTerm& term, int owner, const std::string& what) {
      const std::vector<int> parts = term.participants.empty() ? std::vector<int>{owner} : term.participants;
      int dim = 0;
      for (int i : parts) {
        if (i < 0 || i >= n) fail("game: " + what + " refers to an unknown player");
        dim += player(static_cast<int>(theta), i).stage_dim();
      }
      if (term.fn->input_dim() != dim) fail("game: " + what + " input dimension does not match its participants");
      const int last = term.last_stage < 0 ? horizon : term.last_stage;
      if (term.first_stage < 1 || last > horizon) fail("game: " + what + " stage range outside the horizon");
    };
    for (int i = 0; i < n; ++i) {
      const auto& p = player(static_cast<int>(theta), i);
      for (const auto& c : p.stage_costs) check_term(c, i, "cost of '" + p.name + "'");
      for (const auto& c : p.private_constraints) check_term(c, i, "constraint of '" + p.name + "'");
    }
    for (const auto& s : shared_constraints[theta]) {
      s.validate();
      StageTerm term{s.fn, s.participants, s.first_stage, s.last_stage};
      check_term(term, 0, "shared constraint '" + s.name + "'");
    }
  }
}

ContingencyGame ContingencyGame::with_branching_time(int t_b) const {
  ContingencyGame g = *this;
  g.branching_time = t_b;
  return g;
}

ContingencyGame ContingencyGame::with_belief(std::vector<double> probabilities) const {
  ContingencyGame g = *this;
  g.belief.probabilities = std::move(probabilities);
  g.belief.validate();
  return g;
}

ContingencyGame ContingencyGame::single_hypothesis(int theta) const {
  const auto t = static_cast<std::size_t>(theta);
  ContingencyGame g;
  g.ego = ego;
  g.others = {others.at(t)};
  g.shared_constraints = {shared_constraints.at(t)};
  g.belief.hypotheses = {belief.hypotheses.at(t)};
  g.belief.probabilities = {1.0};
  g.branching_time = 0;
  g.horizon = horizon;
  g.timestep = timestep;
  return g;
}

}  // namespace cgames::game
