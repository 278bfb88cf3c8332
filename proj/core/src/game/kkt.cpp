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

#include "cgames/game/kkt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "kkt_assembler.hpp"

namespace cgames::game {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// r = x_next - f(x, u) over the stacked input (x, u, x_next).
class DynamicsResidual final : public autodiff::LocalFunction {
 public:
  explicit DynamicsResidual(LocalFunctionPtr f)
      : LocalFunction(f->input_dim() + f->output_dim(), f->output_dim(), "dynamics(" + f->name() + ")"),
        f_(std::move(f)),
        n_(f_->output_dim()),
        nm_(f_->input_dim()) {
    const auto& fp = f_->pattern();
    pattern_.jacobian_rows.resize(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k) {
      pattern_.jacobian_rows[static_cast<std::size_t>(k)] =
          fp.jacobian_rows[static_cast<std::size_t>(k)] | (std::uint64_t{1} << (nm_ + k));
    }
    pattern_.hessian_rows.assign(static_cast<std::size_t>(input_dim()), 0);
    std::copy(fp.hessian_rows.begin(), fp.hessian_rows.end(), pattern_.hessian_rows.begin());
    pattern_.curved_inputs = fp.curved_inputs;
  }

  void evaluate(std::span<const double> x, std::span<double> out) const override {
    f_->evaluate(x.first(static_cast<std::size_t>(nm_)), out);
    for (int k = 0; k < n_; ++k) {
      out[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(nm_ + k)] - out[static_cast<std::size_t>(k)];
    }
  }

  void evaluate_jacobian(std::span<const double> x, std::span<double> out,
                         Eigen::Ref<Eigen::MatrixXd> jac) const override {
    f_->evaluate_jacobian(x.first(static_cast<std::size_t>(nm_)), out, jac.leftCols(nm_));
    jac.leftCols(nm_) *= -1.0;
    jac.rightCols(n_).setIdentity();
    for (int k = 0; k < n_; ++k) {
      out[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(nm_ + k)] - out[static_cast<std::size_t>(k)];
    }
  }

  void weighted_hessian(std::span<const double> x, std::span<const double> weights,
                        Eigen::Ref<Eigen::MatrixXd> hess) const override {
    hess.setZero();
    f_->weighted_hessian(x.first(static_cast<std::size_t>(nm_)), weights, hess.topLeftCorner(nm_, nm_));
    hess.topLeftCorner(nm_, nm_) *= -1.0;
  }

 private:
  LocalFunctionPtr f_;
  int n_;
  int nm_;
};

LocalFunctionPtr make_initial_condition(const Eigen::VectorXd& x0) {
  std::vector<double> target(x0.data(), x0.data() + x0.size());
  const int n = static_cast<int>(target.size());
  return autodiff::make_local_function(n, n, "initial_state", [target](auto x, auto out) {
    for (std::size_t k = 0; k < target.size(); ++k) out[k] = x[k] - target[k];
  });
}

// (value - lower, upper - value) for each finite bound of the given inputs.
LocalFunctionPtr make_box(const std::vector<double>& lo, const std::vector<double>& up) {
  int outputs = 0;
  for (std::size_t k = 0; k < lo.size(); ++k) outputs += (std::isfinite(lo[k]) ? 1 : 0) + (std::isfinite(up[k]) ? 1 : 0);
  return autodiff::make_local_function(static_cast<int>(lo.size()), outputs, "bounds", [lo, up](auto x, auto out) {
    std::size_t r = 0;
    for (std::size_t k = 0; k < lo.size(); ++k) {
      if (std::isfinite(lo[k])) out[r++] = x[k] - lo[k];
      if (std::isfinite(up[k])) out[r++] = up[k] - x[k];
    }
  });
}

LocalFunctionPtr make_difference(int m) {
  return autodiff::make_local_function(2 * m, m, "contingency", [m](auto x, auto out) {
    for (int k = 0; k < m; ++k) {
      out[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(m + k)];
    }
  });
}

template <typename Fn>
void for_each_bit(std::uint64_t mask, Fn&& fn) {
  while (mask != 0) {
    fn(std::countr_zero(mask));
    mask &= mask - 1;
  }
}

}  // namespace

Eigen::Index KktLayout::stage_begin(int theta, int player, int t) const {
  const auto th = static_cast<std::size_t>(theta);
  const auto p = static_cast<std::size_t>(player);
  return primal[th][p].begin + static_cast<Eigen::Index>(t - 1) * stage_dims[th][p];
}

bool KktLayout::owns_block(int theta, int player) const {
  return !(player == 0 && ego_plan == EgoPlan::kShared && theta > 0);
}

// ---------------------------------------------------------------------------
// Assembler

Eigen::Index KktAssembler::allocate(Eigen::Index count, VariableKind kind, int owner, int theta) {
  const Eigen::Index begin = layout.dimension;
  for (Eigen::Index k = 0; k < count; ++k) {
    layout.kind.push_back(kind);
    layout.owner.push_back(owner);
    layout.hypothesis.push_back(theta);
    const bool nonneg = kind == VariableKind::kInequalityMultiplier;
    lower.push_back(nonneg ? 0.0 : -kInf);
    upper.push_back(kInf);
  }
  layout.dimension += count;
  return begin;
}

void KktAssembler::add_cost(LocalFunctionPtr fn, std::vector<Eigen::Index> inputs, int owner, double weight) {
  Term t;
  t.fn = std::move(fn);
  t.inputs = std::move(inputs);
  t.is_cost = true;
  t.participants.push_back({owner, weight, {}});
  terms.push_back(std::move(t));
}

void KktAssembler::add_constraint(LocalFunctionPtr fn, std::vector<Eigen::Index> inputs, VariableKind kind,
                                  std::vector<std::pair<int, double>> participants, int theta) {
  Term t;
  t.multiplier_begin = allocate(fn->output_dim(), kind, -1, theta);
  t.fn = std::move(fn);
  t.inputs = std::move(inputs);
  t.is_cost = false;
  for (const auto& [owner, coefficient] : participants) t.participants.push_back({owner, coefficient, {}});
  terms.push_back(std::move(t));
}

void KktAssembler::finalize() {
  const Eigen::Index d = layout.dimension;
  max_inputs = 1;
  max_outputs = 1;
  for (auto& t : terms) {
    if (static_cast<int>(t.inputs.size()) != t.fn->input_dim()) {
      throw std::logic_error("KKT term '" + t.fn->name() + "' has mismatched inputs");
    }
    max_inputs = std::max(max_inputs, t.fn->input_dim());
    max_outputs = std::max(max_outputs, t.fn->output_dim());
    for (auto& p : t.participants) {
      p.owned.clear();
      for (int a = 0; a < static_cast<int>(t.inputs.size()); ++a) {
        if (layout.owner[static_cast<std::size_t>(t.inputs[static_cast<std::size_t>(a)])] == p.owner) {
          p.owned.push_back(a);
        }
      }
    }
  }

  std::vector<Eigen::Triplet<double>> entries;
  for (const auto& t : terms) {
    visit(t, nullptr, nullptr, [&](Eigen::Index r, Eigen::Index c, double) { entries.emplace_back(r, c, 1.0); });
  }
  pattern.resize(d, d);
  pattern.setFromTriplets(entries.begin(), entries.end());
  pattern.makeCompressed();
  std::fill(pattern.valuePtr(), pattern.valuePtr() + pattern.nonZeros(), 0.0);

  const auto* outer = pattern.outerIndexPtr();
  const auto* inner = pattern.innerIndexPtr();
  for (auto& t : terms) {
    t.slots.clear();
    visit(t, nullptr, nullptr, [&](Eigen::Index r, Eigen::Index c, double) {
      const auto* first = inner + outer[c];
      const auto* last = inner + outer[c + 1];
      const auto* it = std::lower_bound(first, last, static_cast<int>(r));
      t.slots.push_back(static_cast<Eigen::Index>(it - inner));
    });
  }
}

template <typename Emit>
void KktAssembler::visit(const Term& t, const Eigen::MatrixXd* hess, const Eigen::MatrixXd* jac,
                         Emit&& emit) const {
  const auto& pat = t.fn->pattern();
  const auto& in = t.inputs;
  if (t.is_cost) {
    const auto& p = t.participants.front();
    for (int a : p.owned) {
      for_each_bit(pat.hessian_rows[static_cast<std::size_t>(a)], [&](int b) {
        emit(in[static_cast<std::size_t>(a)], in[static_cast<std::size_t>(b)], hess ? p.coefficient * (*hess)(a, b) : 0.0);
      });
    }
    return;
  }
  const int m = t.fn->output_dim();
  for (const auto& p : t.participants) {
    for (int a : p.owned) {
      for_each_bit(pat.hessian_rows[static_cast<std::size_t>(a)], [&](int b) {
        emit(in[static_cast<std::size_t>(a)], in[static_cast<std::size_t>(b)],
             hess ? -p.coefficient * (*hess)(a, b) : 0.0);
      });
      for (int k = 0; k < m; ++k) {
        if ((pat.jacobian_rows[static_cast<std::size_t>(k)] >> a) & 1U) {
          emit(in[static_cast<std::size_t>(a)], t.multiplier_begin + k, jac ? -p.coefficient * (*jac)(k, a) : 0.0);
        }
      }
    }
  }
  for (int k = 0; k < m; ++k) {
    for_each_bit(pat.jacobian_rows[static_cast<std::size_t>(k)], [&](int b) {
      emit(t.multiplier_begin + k, in[static_cast<std::size_t>(b)], jac ? (*jac)(k, b) : 0.0);
    });
  }
}

namespace {

struct Scratch {
  std::vector<double> x;
  std::vector<double> out;
  std::vector<double> weights;
  Eigen::MatrixXd jac;
  Eigen::MatrixXd hess;

  Scratch(int max_in, int max_out)
      : x(static_cast<std::size_t>(max_in)),
        out(static_cast<std::size_t>(max_out)),
        weights(static_cast<std::size_t>(max_out)),
        jac(max_out, max_in),
        hess(max_in, max_in) {}
};

}  // namespace

void KktAssembler::residual(const Eigen::VectorXd& v, Eigen::VectorXd& g) const {
  g.setZero(layout.dimension);
  Scratch s(max_inputs, max_outputs);
  for (const auto& t : terms) {
    const int n = t.fn->input_dim();
    const int m = t.fn->output_dim();
    for (int a = 0; a < n; ++a) s.x[static_cast<std::size_t>(a)] = v[t.inputs[static_cast<std::size_t>(a)]];
    const std::span<const double> x(s.x.data(), static_cast<std::size_t>(n));
    const std::span<double> out(s.out.data(), static_cast<std::size_t>(m));
    auto jac = s.jac.topLeftCorner(m, n);
    if (t.is_cost) {
      const auto& p = t.participants.front();
      if (p.coefficient == 0.0) continue;
      t.fn->evaluate_jacobian(x, out, jac);
      for (int a : p.owned) g[t.inputs[static_cast<std::size_t>(a)]] += p.coefficient * jac(0, a);
      continue;
    }
    t.fn->evaluate_jacobian(x, out, jac);
    for (int k = 0; k < m; ++k) g[t.multiplier_begin + k] += out[static_cast<std::size_t>(k)];
    const auto lambda = v.segment(t.multiplier_begin, m);
    for (const auto& p : t.participants) {
      if (p.coefficient == 0.0) continue;
      for (int a : p.owned) {
        g[t.inputs[static_cast<std::size_t>(a)]] -= p.coefficient * lambda.dot(jac.col(a));
      }
    }
  }
}

void KktAssembler::jacobian(const Eigen::VectorXd& v, mcp::SparseMatrix& out) const {
  if (out.rows() != pattern.rows() || out.cols() != pattern.cols() || out.nonZeros() != pattern.nonZeros() ||
      !out.isCompressed()) {
    out = pattern;
  } else {
    std::fill(out.valuePtr(), out.valuePtr() + out.nonZeros(), 0.0);
  }
  double* values = out.valuePtr();
  Scratch s(max_inputs, max_outputs);
  Eigen::MatrixXd jac_local;
  Eigen::MatrixXd hess_local;
  for (const auto& t : terms) {
    const int n = t.fn->input_dim();
    const int m = t.fn->output_dim();
    for (int a = 0; a < n; ++a) s.x[static_cast<std::size_t>(a)] = v[t.inputs[static_cast<std::size_t>(a)]];
    const std::span<const double> x(s.x.data(), static_cast<std::size_t>(n));
    const std::span<double> outv(s.out.data(), static_cast<std::size_t>(m));
    const bool curved = t.fn->pattern().curved_inputs != 0;
    const Eigen::MatrixXd* hess = nullptr;
    const Eigen::MatrixXd* jac = nullptr;
    if (t.is_cost) {
      if (curved && t.participants.front().coefficient != 0.0) {
        hess_local.resize(n, n);
        const double one = 1.0;
        t.fn->weighted_hessian(x, std::span<const double>(&one, 1), hess_local);
        hess = &hess_local;
      }
    } else {
      jac_local.resize(m, n);
      t.fn->evaluate_jacobian(x, outv, jac_local);
      jac = &jac_local;
      bool active = false;
      for (int k = 0; k < m; ++k) {
        s.weights[static_cast<std::size_t>(k)] = v[t.multiplier_begin + k];
        active = active || s.weights[static_cast<std::size_t>(k)] != 0.0;
      }
      if (curved && active) {
        hess_local.resize(n, n);
        t.fn->weighted_hessian(x, std::span<const double>(s.weights.data(), static_cast<std::size_t>(m)), hess_local);
        hess = &hess_local;
      }
    }
    std::size_t slot = 0;
    visit(t, hess, jac, [&](Eigen::Index, Eigen::Index, double value) { values[t.slots[slot++]] += value; });
  }
}

double KktAssembler::lagrangian(int owner, const Eigen::VectorXd& v) const {
  double total = 0.0;
  Scratch s(max_inputs, max_outputs);
  for (const auto& t : terms) {
    double coefficient = 0.0;
    bool involved = false;
    for (const auto& p : t.participants) {
      if (p.owner == owner) {
        coefficient += p.coefficient;
        involved = true;
      }
    }
    if (!involved) continue;
    const int n = t.fn->input_dim();
    const int m = t.fn->output_dim();
    for (int a = 0; a < n; ++a) s.x[static_cast<std::size_t>(a)] = v[t.inputs[static_cast<std::size_t>(a)]];
    t.fn->evaluate(std::span<const double>(s.x.data(), static_cast<std::size_t>(n)),
                   std::span<double>(s.out.data(), static_cast<std::size_t>(m)));
    if (t.is_cost) {
      total += coefficient * s.out[0];
    } else {
      double weighted = 0.0;
      for (int k = 0; k < m; ++k) weighted += v[t.multiplier_begin + k] * s.out[static_cast<std::size_t>(k)];
      total -= coefficient * weighted;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Synthesis

namespace {

std::vector<int> resolve(const StageTerm& term, int owner) {
  return term.participants.empty() ? std::vector<int>{owner} : term.participants;
}

std::vector<Eigen::Index> stage_inputs(const KktLayout& layout, int theta, const std::vector<int>& players, int t) {
  std::vector<Eigen::Index> inputs;
  for (int i : players) {
    const Eigen::Index begin = layout.stage_begin(theta, i, t);
    const int dim = layout.stage_dims[static_cast<std::size_t>(theta)][static_cast<std::size_t>(i)];
    for (int k = 0; k < dim; ++k) inputs.push_back(begin + k);
  }
  return inputs;
}

std::string block_name(const ContingencyGame& game, int theta, const std::string& what) {
  return game.belief.hypotheses[static_cast<std::size_t>(theta)] + "/" + what;
}

void add_private_terms(KktAssembler& as, const ContingencyGame& game, int theta, int i) {
  const auto& spec = game.player(theta, i);
  const auto& layout = as.layout;
  const int pid = layout.player_id[static_cast<std::size_t>(theta)][static_cast<std::size_t>(i)];
  const int n = spec.state_dim;
  const int T = game.horizon;
  const std::vector<std::pair<int, double>> self{{pid, 1.0}};

  // x_1 = initial state.
  {
    std::vector<Eigen::Index> in;
    const Eigen::Index b = layout.stage_begin(theta, i, 1);
    for (int k = 0; k < n; ++k) in.push_back(b + k);
    as.add_constraint(make_initial_condition(spec.initial_state), in, VariableKind::kEqualityMultiplier, self, theta);
  }
  const auto residual = std::make_shared<DynamicsResidual>(spec.dynamics);
  for (int t = 1; t < T; ++t) {
    std::vector<Eigen::Index> in;
    const Eigen::Index b = layout.stage_begin(theta, i, t);
    for (int k = 0; k < spec.stage_dim(); ++k) in.push_back(b + k);
    const Eigen::Index nb = layout.stage_begin(theta, i, t + 1);
    for (int k = 0; k < n; ++k) in.push_back(nb + k);
    as.add_constraint(residual, in, VariableKind::kEqualityMultiplier, self, theta);
  }

  // Box bounds: states from stage 2, controls from stage 1.
  std::vector<int> state_idx;
  std::vector<int> control_idx;
  std::vector<double> lo_full;
  std::vector<double> up_full;
  std::vector<double> lo_ctrl;
  std::vector<double> up_ctrl;
  for (int k = 0; k < n; ++k) {
    if (std::isfinite(spec.state_lower[k]) || std::isfinite(spec.state_upper[k])) {
      state_idx.push_back(k);
      lo_full.push_back(spec.state_lower[k]);
      up_full.push_back(spec.state_upper[k]);
    }
  }
  for (int k = 0; k < spec.control_dim; ++k) {
    if (std::isfinite(spec.control_lower[k]) || std::isfinite(spec.control_upper[k])) {
      control_idx.push_back(k);
      lo_ctrl.push_back(spec.control_lower[k]);
      up_ctrl.push_back(spec.control_upper[k]);
    }
  }
  lo_full.insert(lo_full.end(), lo_ctrl.begin(), lo_ctrl.end());
  up_full.insert(up_full.end(), up_ctrl.begin(), up_ctrl.end());
  LocalFunctionPtr box_full = lo_full.empty() ? nullptr : make_box(lo_full, up_full);
  LocalFunctionPtr box_ctrl = lo_ctrl.empty() ? nullptr : make_box(lo_ctrl, up_ctrl);
  for (int t = 1; t <= T; ++t) {
    const Eigen::Index b = layout.stage_begin(theta, i, t);
    std::vector<Eigen::Index> in;
    if (t > 1) {
      for (int k : state_idx) in.push_back(b + k);
    }
    for (int k : control_idx) in.push_back(b + n + k);
    if (in.empty()) continue;
    const auto& fn = t > 1 ? box_full : box_ctrl;
    if (!fn) continue;
    as.add_constraint(fn, in, VariableKind::kInequalityMultiplier, self, theta);
  }

  for (const auto& c : spec.private_constraints) {
    const auto parts = resolve(c, i);
    const int last = c.last_stage < 0 ? T : c.last_stage;
    for (int t = c.first_stage; t <= last; ++t) {
      as.add_constraint(c.fn, stage_inputs(layout, theta, parts, t), VariableKind::kInequalityMultiplier, self, theta);
    }
  }
}

}  // namespace

KktSystem build_kkt_mcp(const ContingencyGame& game, EgoPlan ego_plan) {
  game.validate();
  auto as = std::make_shared<KktAssembler>();
  KktLayout& layout = as->layout;
  layout.horizon = game.horizon;
  layout.ego_plan = ego_plan;
  const int K = game.num_hypotheses();
  const int T = game.horizon;
  layout.primal.resize(static_cast<std::size_t>(K));
  layout.stage_dims.resize(static_cast<std::size_t>(K));
  layout.state_dims.resize(static_cast<std::size_t>(K));
  layout.private_multipliers.resize(static_cast<std::size_t>(K));
  layout.shared_multipliers.resize(static_cast<std::size_t>(K));
  layout.shared_constraint_multipliers.resize(static_cast<std::size_t>(K));
  layout.player_id.resize(static_cast<std::size_t>(K));
  int next_id = 1;

  for (int theta = 0; theta < K; ++theta) {
    const auto th = static_cast<std::size_t>(theta);
    const int np = game.num_players(theta);
    layout.primal[th].resize(static_cast<std::size_t>(np));
    layout.stage_dims[th].resize(static_cast<std::size_t>(np));
    layout.state_dims[th].resize(static_cast<std::size_t>(np));
    layout.private_multipliers[th].resize(static_cast<std::size_t>(np));
    layout.player_id[th].resize(static_cast<std::size_t>(np));
    for (int i = 0; i < np; ++i) {
      const auto& spec = game.player(theta, i);
      const int pid = i == 0 ? 0 : next_id++;
      layout.player_id[th][static_cast<std::size_t>(i)] = pid;
      layout.stage_dims[th][static_cast<std::size_t>(i)] = spec.stage_dim();
      layout.state_dims[th][static_cast<std::size_t>(i)] = spec.state_dim;
      if (!layout.owns_block(theta, i)) {
        layout.primal[th][static_cast<std::size_t>(i)] = layout.primal[0][0];
        continue;
      }
      const Eigen::Index count = static_cast<Eigen::Index>(T) * spec.stage_dim();
      const Eigen::Index begin = as->allocate(count, VariableKind::kPrimal, pid, theta);
      layout.primal[th][static_cast<std::size_t>(i)] = {begin, begin + count};
      as->labels.push_back({block_name(game, theta, "z/" + spec.name), begin, begin + count});
    }
    for (int i = 0; i < np; ++i) {
      const Eigen::Index begin = layout.dimension;
      if (layout.owns_block(theta, i)) add_private_terms(*as, game, theta, i);
      layout.private_multipliers[th][static_cast<std::size_t>(i)] = {begin, layout.dimension};
      if (layout.dimension > begin) {
        as->labels.push_back({block_name(game, theta, "lambda/" + game.player(theta, i).name), begin, layout.dimension});
      }
    }
    const double belief = game.belief.probabilities[th];
    const Eigen::Index shared_begin = layout.dimension;
    for (const auto& s : game.shared_constraints[th]) {
      const Eigen::Index c_begin = layout.dimension;
      std::vector<std::pair<int, double>> parts;
      for (std::size_t k = 0; k < s.participants.size(); ++k) {
        const int i = s.participants[k];
        double coefficient = s.multiplier_ratio[k] / s.multiplier_ratio[0];
        if (i == 0) coefficient *= belief;
        parts.emplace_back(layout.player_id[th][static_cast<std::size_t>(i)], coefficient);
      }
      const int last = s.last_stage < 0 ? T : s.last_stage;
      for (int t = s.first_stage; t <= last; ++t) {
        as->add_constraint(s.fn, stage_inputs(layout, theta, s.participants, t), VariableKind::kInequalityMultiplier,
                           parts, theta);
      }
      layout.shared_constraint_multipliers[th].push_back({c_begin, layout.dimension});
    }
    layout.shared_multipliers[th] = {shared_begin, layout.dimension};
    if (layout.dimension > shared_begin) {
      as->labels.push_back({block_name(game, theta, "lambda/shared"), shared_begin, layout.dimension});
    }

    for (int i = 0; i < np; ++i) {
      const auto& spec = game.player(theta, i);
      const double weight = i == 0 ? belief : 1.0;
      const int pid = layout.player_id[th][static_cast<std::size_t>(i)];
      for (const auto& c : spec.stage_costs) {
        const auto parts = resolve(c, i);
        const int last = c.last_stage < 0 ? T : c.last_stage;
        for (int t = c.first_stage; t <= last; ++t) {
          as->add_cost(c.fn, stage_inputs(layout, theta, parts, t), pid, weight);
        }
      }
    }
  }

  layout.rho = {layout.dimension, layout.dimension};
  if (ego_plan == EgoPlan::kPerHypothesis && K > 1 && game.branching_time > 0) {
    const int n = game.ego.state_dim;
    const int m = game.ego.control_dim;
    const auto diff = make_difference(m);
    for (int k = 1; k < K; ++k) {
      for (int t = 1; t <= game.branching_time; ++t) {
        std::vector<Eigen::Index> in;
        const Eigen::Index a = layout.stage_begin(0, 0, t) + n;
        const Eigen::Index b = layout.stage_begin(k, 0, t) + n;
        for (int j = 0; j < m; ++j) in.push_back(a + j);
        for (int j = 0; j < m; ++j) in.push_back(b + j);
        // L^A gains +rho^T c, i.e. coefficient -1 in the -lambda^T g convention.
        as->add_constraint(diff, in, VariableKind::kContingencyMultiplier, {{0, -1.0}}, -1);
      }
    }
    layout.rho.end = layout.dimension;
    as->labels.push_back({"rho", layout.rho.begin, layout.rho.end});
  }
  layout.num_player_ids = next_id;
  as->finalize();

  Eigen::VectorXd lower = Eigen::Map<const Eigen::VectorXd>(as->lower.data(), layout.dimension);
  Eigen::VectorXd upper = Eigen::Map<const Eigen::VectorXd>(as->upper.data(), layout.dimension);
  std::shared_ptr<const KktAssembler> shared = as;
  auto problem = std::make_shared<const mcp::MixedComplementarityProblem>(
      std::move(lower), std::move(upper),
      [shared](const Eigen::VectorXd& v, Eigen::VectorXd& g) { shared->residual(v, g); },
      [shared](const Eigen::VectorXd& v, mcp::SparseMatrix& j) { shared->jacobian(v, j); }, as->labels);
  return KktSystem(shared, problem);
}

// ---------------------------------------------------------------------------
// KktSystem

KktSystem::KktSystem(std::shared_ptr<const KktAssembler> assembler,
                     std::shared_ptr<const mcp::MixedComplementarityProblem> problem)
    : assembler_(std::move(assembler)), problem_(std::move(problem)) {}

const KktLayout& KktSystem::layout() const { return assembler_->layout; }

Eigen::Index KktSystem::structural_nonzeros() const { return assembler_->pattern.nonZeros(); }

Eigen::VectorXd KktSystem::pack(const TrajectoryProfile& profile, const Multipliers& multipliers) const {
  const auto& L = layout();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(L.dimension);
  const auto K = L.primal.size();
  if (profile.branches.size() != K) throw std::invalid_argument("pack: profile has the wrong number of hypotheses");
  for (std::size_t th = 0; th < K; ++th) {
    for (std::size_t i = 0; i < L.primal[th].size(); ++i) {
      if (!L.owns_block(static_cast<int>(th), static_cast<int>(i))) continue;
      const auto& traj = profile.branches[th].at(i);
      const Eigen::Index n = traj.states.rows();
      const Eigen::Index m = traj.controls.rows();
      if (n + m != L.stage_dims[th][i] || traj.states.cols() != L.horizon || traj.controls.cols() != L.horizon) {
        throw std::invalid_argument("pack: trajectory dimensions do not match the game");
      }
      for (int t = 1; t <= L.horizon; ++t) {
        const Eigen::Index b = L.stage_begin(static_cast<int>(th), static_cast<int>(i), t);
        v.segment(b, n) = traj.states.col(t - 1);
        v.segment(b + n, m) = traj.controls.col(t - 1);
      }
    }
  }
  auto put = [&v](const IndexRange& r, const Eigen::VectorXd& values) {
    if (values.size() == 0) return;
    if (values.size() != r.size()) throw std::invalid_argument("pack: multiplier block has the wrong size");
    v.segment(r.begin, r.size()) = values;
  };
  for (std::size_t th = 0; th < multipliers.player.size() && th < K; ++th) {
    for (std::size_t i = 0; i < multipliers.player[th].size() && i < L.private_multipliers[th].size(); ++i) {
      put(L.private_multipliers[th][i], multipliers.player[th][i]);
    }
  }
  for (std::size_t th = 0; th < multipliers.shared.size() && th < K; ++th) put(L.shared_multipliers[th], multipliers.shared[th]);
  put(L.rho, multipliers.rho);
  return v;
}

Eigen::VectorXd KktSystem::initial_point(const TrajectoryProfile& profile, double inequality_start) const {
  Eigen::VectorXd v = pack(profile, Multipliers{});
  const auto& kinds = layout().kind;
  for (std::size_t j = 0; j < kinds.size(); ++j) {
    if (kinds[j] == VariableKind::kInequalityMultiplier) v[static_cast<Eigen::Index>(j)] = inequality_start;
  }
  return v;
}

TrajectoryProfile KktSystem::unpack_profile(const Eigen::VectorXd& v) const {
  const auto& L = layout();
  TrajectoryProfile profile;
  profile.branches.resize(L.primal.size());
  for (std::size_t th = 0; th < L.primal.size(); ++th) {
    for (std::size_t i = 0; i < L.primal[th].size(); ++i) {
      const int dim = L.stage_dims[th][i];
      const int sn = L.state_dims[th][i];
      PlayerTrajectory traj;
      traj.states.resize(sn, L.horizon);
      traj.controls.resize(dim - sn, L.horizon);
      for (int t = 1; t <= L.horizon; ++t) {
        const Eigen::Index b = L.stage_begin(static_cast<int>(th), static_cast<int>(i), t);
        traj.states.col(t - 1) = v.segment(b, sn);
        traj.controls.col(t - 1) = v.segment(b + sn, dim - sn);
      }
      profile.branches[th].push_back(std::move(traj));
    }
  }
  return profile;
}

Multipliers KktSystem::unpack_multipliers(const Eigen::VectorXd& v) const {
  const auto& L = layout();
  Multipliers out;
  out.player.resize(L.primal.size());
  for (std::size_t th = 0; th < L.primal.size(); ++th) {
    for (const auto& r : L.private_multipliers[th]) out.player[th].push_back(v.segment(r.begin, r.size()));
    out.shared.push_back(v.segment(L.shared_multipliers[th].begin, L.shared_multipliers[th].size()));
  }
  out.rho = v.segment(L.rho.begin, L.rho.size());
  return out;
}

double KktSystem::lagrangian(int player_id, const Eigen::VectorXd& v) const {
  return assembler_->lagrangian(player_id, v);
}

std::vector<Eigen::Index> KktSystem::primal_indices(int player_id) const {
  std::vector<Eigen::Index> out;
  const auto& owner = layout().owner;
  for (std::size_t j = 0; j < owner.size(); ++j) {
    if (owner[j] == player_id) out.push_back(static_cast<Eigen::Index>(j));
  }
  return out;
}

}  // namespace cgames::game
