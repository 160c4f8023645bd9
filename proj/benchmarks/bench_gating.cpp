// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "wina/gating.hpp"
#include "wina/random.hpp"

namespace {

using namespace wina;

void BM_GateMagnitude(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Vector x = gaussian_vector(n, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gate_magnitude(x, n / 2));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GateWina(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Vector x = gaussian_vector(n, 3);
    const Vector c = column_norms(gaussian_matrix(64, n, 4));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gate_wina(x, c, n / 2));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_GateMagnitude)->RangeMultiplier(4)->Range(1024, 16384);
BENCHMARK(BM_GateWina)->RangeMultiplier(4)->Range(1024, 16384);

} // namespace
