/*
 Copyright 2026 The sflow Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/


// Timings for the pieces the solvers call in their inner loops, on the
// pinned Michaelis-Menten problem (rows of data/michaelis_menten.csv).

#include <benchmark/benchmark.h>

#include "sflow/sflow.hpp"

namespace {

using namespace sflow;

struct Problem {
  Objective train;
  Objective validation;
  ControlPartition partition = ControlPartition::from_leader({true, false});
  Vector theta0 = (Vector(2) << 4.0, 0.1).finished();

  explicit Problem(SplitDatasets split)
      : train(ModelSpec::michaelis_menten(), split.train, LossScale::One),
        validation(ModelSpec::michaelis_menten(), split.validation, LossScale::One) {}

  static Problem make() {
    const Dataset data = Dataset::from_scalar(
        {0.3330, 0.1670, 0.0833, 0.0416, 0.0208, 0.0104, 0.0052},
        {3.6360, 3.6360, 3.2360, 2.6660, 2.1140, 1.4660, 0.8661});
    return Problem(apply_split(data, SplitSpec{{0, 2, 4, 6}, {1, 3, 5}}));
  }

  FollowerProblem follower(const TimeGrid& grid) const {
    return {train, 0.01, 0.1, partition, zero(grid), grid, theta0};
  }
  LeaderProblem leader(const TimeGrid& grid) const {
    return {train, validation, 0.005, 1e5, partition, zero(grid), grid, theta0, TerminalMode::Penalty};
  }
  static ControlSignal zero(const TimeGrid& grid) {
    return ControlSignal::constant(grid, Vector::Zero(2), 0.5);
  }
};

const Problem& problem() {
  static const Problem p = Problem::make();
  return p;
}

void BM_ForwardSweep(benchmark::State& state) {
  const Problem& p = problem();
  const TimeGrid grid(1.5, static_cast<int>(state.range(0)));
  const ControlSignal u = Problem::zero(grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_sweep(p.train, p.theta0, u, u, p.partition));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ForwardSweep)->RangeMultiplier(2)->Range(750, 6000)->Complexity(benchmark::oN);

void BM_FollowerSweep(benchmark::State& state) {
  const Problem& p = problem();
  const TimeGrid grid(1.5, static_cast<int>(state.range(0)));
  const FollowerProblem fp = p.follower(grid);
  const ControlSignal u = Problem::zero(grid);
  for (auto _ : state) benchmark::DoNotOptimize(follower_sweep(fp, u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FollowerSweep)->RangeMultiplier(2)->Range(750, 6000)->Complexity(benchmark::oN);

void BM_LeaderSweep(benchmark::State& state) {
  const Problem& p = problem();
  const TimeGrid grid(1.5, static_cast<int>(state.range(0)));
  const LeaderProblem lp = p.leader(grid);
  const ControlSignal u = Problem::zero(grid);
  for (auto _ : state) benchmark::DoNotOptimize(leader_sweep(lp, u));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LeaderSweep)->RangeMultiplier(2)->Range(750, 6000)->Complexity(benchmark::oN);

void BM_SolveFollower(benchmark::State& state) {
  const Problem& p = problem();
  const TimeGrid grid(1.5, 6000);
  const FollowerProblem fp = p.follower(grid);
  FollowerOptions opt;
  opt.inner_tol = 1e-6;
  opt.max_inner = 500;
  opt.throw_on_stall = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_follower(fp, Problem::zero(grid), opt));
}
BENCHMARK(BM_SolveFollower)->Unit(benchmark::kMillisecond);

void BM_HessianVectorProduct(benchmark::State& state) {
  const Problem& p = problem();
  const Vector theta = (Vector(2) << 3.9, 0.018).finished();
  const Vector v = (Vector(2) << 0.3, -0.7).finished();
  for (auto _ : state) benchmark::DoNotOptimize(p.train.hvp(theta, v));
}
BENCHMARK(BM_HessianVectorProduct);

}  // namespace

BENCHMARK_MAIN();
