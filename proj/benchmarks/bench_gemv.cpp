// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "wina/gating.hpp"
#include "wina/random.hpp"
#include "wina/sparse_kernel.hpp"

namespace {

using namespace wina;

struct Fixture {
    ColMajorMatrix w;
    Vector x;
    Vector c;
};

const Fixture& fixture(std::size_t rows, std::size_t cols) {
    static Fixture f;
    if (f.w.rows() != rows || f.w.cols() != cols) {
        f.w = ColMajorMatrix(gaussian_matrix(rows, cols, 1));
        f.x = gaussian_vector(cols, 2);
        f.c = column_norms(f.w);
    }
    return f;
}

void BM_DenseGemv(benchmark::State& state) {
    const auto& f = fixture(state.range(0), state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dense_gemv(f.w, f.x));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

// range(2) is the sparsity in percent.
void BM_TealGemv(benchmark::State& state) {
    const auto& f = fixture(state.range(0), state.range(1));
    const std::size_t k = keep_count(static_cast<double>(state.range(2)) / 100.0, f.w.cols());
    const GateMask g = gate_magnitude(f.x, k);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sparse_gemv(f.w, f.x, g));
    }
}

void BM_WinaGemvWithGate(benchmark::State& state) {
    const auto& f = fixture(state.range(0), state.range(1));
    const std::size_t k = keep_count(static_cast<double>(state.range(2)) / 100.0, f.w.cols());
    for (auto _ : state) {
        benchmark::DoNotOptimize(wina_gated_gemv(f.w, f.x, f.c, k));
    }
}

BENCHMARK(BM_DenseGemv)->Args({2048, 8192})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TealGemv)->ArgsProduct({{2048}, {8192}, {25, 50, 80}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_WinaGemvWithGate)->ArgsProduct({{2048}, {8192}, {25, 50, 80}})->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
