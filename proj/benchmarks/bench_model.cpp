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
#include "clmatch/fit.hpp"

namespace {

using namespace clmatch;

const cartpend::Experiment &experiment() {
    static const cartpend::Experiment ex = cartpend::default_experiment({}, 11);
    return ex;
}

void BM_ModelEvaluate(benchmark::State &state) {
    const auto &model = *experiment().model;
    Vector q(2);
    q << 0.3, 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.evaluate(q));
    }
}
BENCHMARK(BM_ModelEvaluate);

void BM_ModelMassFlow(benchmark::State &state) {
    const auto &model = *experiment().model;
    Vector q(2), qd(2);
    q << 0.3, 0.1;
    qd << 0.5, -0.2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.mass_flow(q, qd));
    }
}
BENCHMARK(BM_ModelMassFlow);

void BM_Fit(benchmark::State &state) {
    const cartpend::CartPendParams p;
    const int r = static_cast<int>(state.range(0));
    const auto sys = cartpend::build_system(p);
    const CenterSet cs = cartpend::center_family(p, r);
    const FitConfig cfg = cartpend::default_fit_config(p);
    const VectorField vg = [p](const Vector &q) { return cartpend::vc_grad(p, q); };
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit(cs, *sys, vg, cfg));
    }
}
BENCHMARK(BM_Fit)->Arg(5)->Arg(11)->Unit(benchmark::kMillisecond);

} // namespace
