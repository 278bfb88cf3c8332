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


#include <benchmark/benchmark.h>

#include <limits>
#include <random>

#include "cgames/game/kkt.hpp"
#include "cgames/game/operations.hpp"
#include "cgames/game/solve.hpp"
#include "cgames/mcp/lcp_enumeration.hpp"
#include "cgames/mcp/problem.hpp"
#include "cgames/mcp/solver.hpp"
#include "cgames/scenarios/builders.hpp"

namespace {

using namespace cgames;

scenarios::ScenarioId scenario(const benchmark::State& state) {
  return state.range(0) == 0 ? scenarios::ScenarioId::kJaywalking : scenarios::ScenarioId::kOvertaking;
}

void BM_NominalSolve(benchmark::State& state) {
  const auto g = scenarios::build_game(scenarios::default_config(scenario(state)));
  int iterations = 0;
  for (auto _ : state) {
    const auto s = game::solve_contingency_game(g);
    if (!s.converged()) state.SkipWithError("solve did not converge");
    iterations = s.solver.iterations;
    benchmark::DoNotOptimize(s.kkt_residual);
  }
  state.counters["newton_iterations"] = iterations;
  state.SetLabel(scenarios::to_string(scenario(state)));
}
BENCHMARK(BM_NominalSolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_KktSynthesis(benchmark::State& state) {
  const auto g = scenarios::build_game(scenarios::default_config(scenario(state)));
  for (auto _ : state) {
    auto system = game::build_kkt_mcp(g);
    benchmark::DoNotOptimize(system.dimension());
  }
  state.SetLabel(scenarios::to_string(scenario(state)));
}
BENCHMARK(BM_KktSynthesis)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ResidualAndJacobian(benchmark::State& state) {
  const auto g = scenarios::build_game(scenarios::default_config(scenario(state)));
  const auto system = game::build_kkt_mcp(g);
  const Eigen::VectorXd v = system.initial_point(game::zero_control_profile(g));
  Eigen::VectorXd out(v.size());
  mcp::SparseMatrix J;
  for (auto _ : state) {
    system.problem().residual(v, out);
    system.problem().jacobian(v, J);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["dimension"] = static_cast<double>(v.size());
  state.SetLabel(scenarios::to_string(scenario(state)));
}
BENCHMARK(BM_ResidualAndJacobian)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

struct Lcp {
  Eigen::MatrixXd M;
  Eigen::VectorXd q, lower, upper;
};

Lcp random_lcp(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd A(d, d);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = n(rng);
  Lcp p{A.transpose() * A + 0.1 * Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd(d), Eigen::VectorXd::Zero(d),
        Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity())};
  for (int i = 0; i < d; ++i) p.q[i] = 2.0 * n(rng);
  return p;
}

void BM_LcpNewton(benchmark::State& state) {
  const auto p = random_lcp(static_cast<int>(state.range(0)), 3);
  const auto problem = mcp::make_affine_mcp(p.M, p.q, p.lower, p.upper);
  for (auto _ : state) {
    const auto r = mcp::solve_mcp(problem, Eigen::VectorXd::Zero(p.q.size()));
    benchmark::DoNotOptimize(r.solution.data());
  }
}
BENCHMARK(BM_LcpNewton)->Arg(4)->Arg(8)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_LcpEnumeration(benchmark::State& state) {
  const auto p = random_lcp(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    const auto s = mcp::solve_lcp_bruteforce(p.M, p.q, p.lower, p.upper);
    benchmark::DoNotOptimize(s.data());
  }
}
BENCHMARK(BM_LcpEnumeration)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
