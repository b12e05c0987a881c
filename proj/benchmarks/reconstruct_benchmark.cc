// Copyright 2026 The gradrecon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "gradrecon/harness.h"
#include "gradrecon/reconstruct.h"
#include "gradrecon/trajectory.h"

namespace gradrecon {
namespace {

MeasurementSet MakeMeasurements(int n, int count, const StepSizePolicy& policy) {
  Rng rng(7, 0, StreamDomain::kUtility);
  const ProblemInstance instance(SampleUtility(n, 1.0, 10.0, rng));
  Rng start(7, 0, StreamDomain::kInitialPoint);
  const Trace trace =
      Run(instance, policy, SampleInitialPoint(instance, start), count, CounterStream(7, 0));
  return Measurements(trace);
}

void BM_Constant(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MeasurementSet ms = MakeMeasurements(n, n + 1, StepSizePolicy::Constant(0.1));
  for (auto _ : state) benchmark::DoNotOptimize(ReconstructConstant(ms));
}
BENCHMARK(BM_Constant)->DenseRange(3, 8);

void BM_FinitePoly(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::vector<double> values = {0.1, 0.2};
  const MeasurementSet ms = MakeMeasurements(n, n + 1, StepSizePolicy::UniformFinite(values));
  for (auto _ : state) benchmark::DoNotOptimize(ReconstructFinitePoly(ms, values));
}
BENCHMARK(BM_FinitePoly)->DenseRange(3, 8);

void BM_FiniteEnum(benchmark::State& state) {
  const int count = static_cast<int>(state.range(0));
  const std::vector<double> values = {0.1, 0.2};
  const MeasurementSet ms = MakeMeasurements(5, count, StepSizePolicy::UniformFinite(values));
  for (auto _ : state) benchmark::DoNotOptimize(ReconstructFiniteEnum(ms, values));
  state.SetItemsProcessed(state.iterations() * (1LL << count));
}
BENCHMARK(BM_FiniteEnum)->DenseRange(6, 13, 1);

void BM_AgentDependent(benchmark::State& state) {
  const int count = static_cast<int>(state.range(0));
  const std::vector<double> values = {0.05, 0.1};
  const MeasurementSet ms = MakeMeasurements(4, count, StepSizePolicy::AgentDependent(values));
  for (auto _ : state) benchmark::DoNotOptimize(ReconstructAgentDependent(ms, values));
}
BENCHMARK(BM_AgentDependent)->Arg(10)->Arg(25)->Arg(50);

void BM_VerifyConstant(benchmark::State& state) {
  ExperimentConfig config = ConfigFromJson(R"({"mode": "constant", "n": 5, "trials": 20})");
  for (auto _ : state) benchmark::DoNotOptimize(VerifyTheorem(Theorem::kT1, config));
}
BENCHMARK(BM_VerifyConstant)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace gradrecon

BENCHMARK_MAIN();
