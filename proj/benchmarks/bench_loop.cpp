/*
 Copyright 2026 The clmatch Authors

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

#include <benchmark/benchmark.h>

#include "clmatch/cartpend.hpp"
#include "clmatch/controller.hpp"
#include "clmatch/sim.hpp"

namespace {

using namespace clmatch;

const cartpend::Experiment &experiment() {
    static const cartpend::Experiment ex = cartpend::default_experiment({}, 11);
    return ex;
}

State sample_state() {
    State s{Vector(2), Vector(2)};
    s.q << 0.4, 0.2;
    s.qd << -0.3, 0.7;
    return s;
}

void BM_Control(benchmark::State &state) {
    const auto &spec = experiment().controller;
    const State s = sample_state();
    for (auto _ : state) {
        benchmark::DoNotOptimize(control(spec, s));
    }
}
BENCHMARK(BM_Control);

void BM_StepOpenLoop(benchmark::State &state) {
    const auto sys = cartpend::build_system({});
    State s = sample_state();
    for (auto _ : state) {
        s = step(*sys, nullptr, s, 1e-3);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_StepOpenLoop);

void BM_StepClosedLoop(benchmark::State &state) {
    const auto &ex = experiment();
    State s = sample_state();
    for (auto _ : state) {
        s = step(*ex.system, &ex.controller, s, 1e-3);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_StepClosedLoop);

void BM_RunOneSecond(benchmark::State &state) {
    const auto &ex = experiment();
    SimConfig c;
    c.t_end = 1.0;
    c.initial = sample_state();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run(*ex.system, &ex.controller, c));
    }
}
BENCHMARK(BM_RunOneSecond)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
