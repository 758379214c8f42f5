// Copyright 2026 The dgten Authors
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

#include <random>
#include <vector>

#include "dgten/metrics.hpp"

namespace {

void BM_EvaluateLogits(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise;
    std::bernoulli_distribution positive(0.1);
    std::vector<double> logits(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = positive(rng) ? 1 : 0;
        logits[i] = noise(rng) + labels[i];
    }
    for (auto _ : state) benchmark::DoNotOptimize(dgten::evaluate_logits(logits, labels));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateLogits)->Arg(1000)->Arg(100000);

}  // namespace
