// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <memory>

#include "common.hpp"
#include "wina/sparse_kernel.hpp"
#include "wina/version.hpp"

namespace wina::cli {

namespace {

struct GemvFlags {
    std::size_t rows = 2048;
    std::size_t cols = 8192;
    bool phi4_shape = false;
    std::size_t batch = 1;
    std::string sparsity = "0,0.25,0.4,0.5,0.65,0.8";
    std::size_t reps = 30;
    std::uint64_t seed = 0;
    std::string out;
};

int run(const GemvFlags& f, const CLI::App& sub) {
    const std::uint64_t seed = sub.count("--seed") > 0 ? f.seed : default_seed();
    std::size_t rows = f.rows;
    std::size_t cols = f.cols;
    if (f.phi4_shape) {
        rows = 5120;
        cols = 17920;
    }
    if (f.reps < kMinGemvReps) {
        throw UsageError("--reps must be >= " + std::to_string(kMinGemvReps));
    }
    const auto grid = parse_reals(f.sparsity, "--sparsity");
    const LatencyReport report = bench_latency(rows, cols, f.batch, grid, f.reps, seed);
    const std::string out = f.out.empty() ? "gemv_bench_" + std::to_string(rows) + "x" + std::to_string(cols) + ".csv"
                                          : f.out;
    write_text(out, to_csv(report));
    std::cout << "# wina " << kVersion << " gemv-bench  seed=" << seed << "  (single-threaded, serial measurement)\n";
    std::cout << format_table(report);
    std::cout << "wrote " << out << '\n';
    return kExitOk;
}

} // namespace

void register_gemv_bench(CLI::App& app, int& exit_code) {
    auto flags = std::make_shared<GemvFlags>();
    CLI::App* sub = app.add_subcommand("gemv-bench", "Dense vs column-gather sparse GEMV latency");
    sub->add_option("--rows", flags->rows, "Output dimension")->capture_default_str();
    sub->add_option("--cols", flags->cols, "Input dimension")->capture_default_str();
    sub->add_flag("--phi4-shape", flags->phi4_shape, "Use 5120x17920, the largest phi-4 weight matrix");
    sub->add_option("--batch", flags->batch, "Vectors per timed call")->capture_default_str();
    sub->add_option("--sparsity", flags->sparsity, "Sparsity grid")->capture_default_str();
    sub->add_option("--reps", flags->reps, "Timed repetitions (>= 30)")->capture_default_str();
    sub->add_option("--seed", flags->seed, "Data seed (default $WINA_SEED or 0)");
    sub->add_option("--out", flags->out, "CSV path (default gemv_bench_<rows>x<cols>.csv)");
    sub->callback([flags, sub, &exit_code] { exit_code = guarded("gemv-bench", [&] { return run(*flags, *sub); }); });
}

} // namespace wina::cli
