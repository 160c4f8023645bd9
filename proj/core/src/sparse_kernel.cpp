// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "wina/sparse_kernel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "wina/errors.hpp"
#include "wina/random.hpp"

namespace wina {

ColMajorMatrix::ColMajorMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols), norms_(cols) {}

ColMajorMatrix::ColMajorMatrix(const Matrix& m) : ColMajorMatrix(m.rows(), m.cols()) {
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            data_[j * rows_ + i] = m(i, j);
        }
    }
    for (std::size_t j = 0; j < cols_; ++j) {
        norms_[j] = norm2(column(j));
    }
}

Matrix ColMajorMatrix::to_row_major() const {
    Matrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            m(i, j) = data_[j * rows_ + i];
        }
    }
    return m;
}

Vector column_norms(const ColMajorMatrix& w) {
    return w.norms();
}

void gather_gemv(const ColMajorMatrix& w, const double* x, std::span<const std::size_t> idx, double* y,
                 MacCounter* counter) {
    const std::size_t rows = w.rows();
    std::fill(y, y + rows, 0.0);
    for (std::size_t j : idx) {
        const double xj = x[j];
        const double* col = w.data() + j * rows;
        for (std::size_t i = 0; i < rows; ++i) {
            y[i] += xj * col[i];
        }
    }
    if (counter != nullptr) {
        counter->macs += static_cast<std::uint64_t>(idx.size()) * rows;
        ++counter->calls;
    }
}

Vector dense_gemv(const ColMajorMatrix& w, const Vector& x, MacCounter* counter) {
    if (x.size() != w.cols()) {
        throw InvalidInput("dense_gemv: x has length " + std::to_string(x.size()) + ", W has " +
                           std::to_string(w.cols()) + " columns");
    }
    std::vector<double> y(w.rows());
    const std::size_t rows = w.rows();
    for (std::size_t j = 0; j < w.cols(); ++j) {
        const double xj = x[j];
        const double* col = w.data() + j * rows;
        for (std::size_t i = 0; i < rows; ++i) {
            y[i] += xj * col[i];
        }
    }
    if (counter != nullptr) {
        counter->macs += static_cast<std::uint64_t>(w.cols()) * rows;
        ++counter->calls;
    }
    return Vector(std::move(y));
}

Vector sparse_gemv(const ColMajorMatrix& w, const Vector& x, const GateMask& g, MacCounter* counter) {
    if (x.size() != w.cols() || g.n() != w.cols()) {
        throw InvalidInput("sparse_gemv: W has " + std::to_string(w.cols()) + " columns, x has length " +
                           std::to_string(x.size()) + ", mask has length " + std::to_string(g.n()));
    }
    const std::vector<std::size_t> idx = g.kept_indices();
    std::vector<double> y(w.rows());
    gather_gemv(w, x.span().data(), idx, y.data(), counter);
    return Vector(std::move(y));
}

Vector wina_gated_gemv(const ColMajorMatrix& w, const Vector& x, const Vector& c, std::size_t k,
                       MacCounter* counter) {
    if (c.size() != w.cols()) {
        throw InvalidInput("wina_gated_gemv: c has length " + std::to_string(c.size()) + ", W has " +
                           std::to_string(w.cols()) + " columns");
    }
    const Vector& actual = w.norms();
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (std::abs(actual[j] - c[j]) > 1e-10 * std::max(1.0, actual[j])) {
            throw InvalidInput("wina_gated_gemv: stale column norms (column " + std::to_string(j) + ": given " +
                               std::to_string(c[j]) + ", actual " + std::to_string(actual[j]) + ")");
        }
    }
    return sparse_gemv(w, x, gate_wina(x, c, k), counter);
}

const LatencyRow& LatencyReport::at(const std::string& variant, double sparsity) const {
    for (const auto& r : results) {
        if (r.variant == variant && std::abs(r.sparsity - sparsity) < 1e-12) {
            return r;
        }
    }
    throw InvalidInput("latency report: no row for " + variant + " at sparsity " + std::to_string(sparsity));
}

namespace {

using Clock = std::chrono::steady_clock;

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Keeps the compiler from discarding results.
volatile double g_sink = 0.0;

struct Samples {
    std::vector<double> plain;
    std::vector<double> with_gate;
};

} // namespace

LatencyReport bench_latency(std::size_t rows, std::size_t cols, std::size_t batch,
                            std::span<const double> sparsity_grid, std::size_t reps, std::uint64_t seed) {
    if (rows == 0 || cols == 0 || batch == 0) {
        throw InvalidInput("bench_latency: rows, cols and batch must be positive");
    }
    if (reps < kMinGemvReps) {
        throw InvalidInput("bench_latency: reps must be >= " + std::to_string(kMinGemvReps));
    }
    if (sparsity_grid.empty()) {
        throw InvalidInput("bench_latency: empty sparsity grid");
    }
    for (double s : sparsity_grid) {
        if (!(s >= 0.0 && s < 1.0)) {
            throw InvalidInput("bench_latency: sparsity " + std::to_string(s) + " outside [0, 1)");
        }
    }

    const ColMajorMatrix w(gaussian_matrix(rows, cols, derive_seed(seed, {1})));
    const Vector c = column_norms(w);
    std::vector<Vector> xs;
    for (std::size_t b = 0; b < batch; ++b) {
        xs.push_back(gaussian_vector(cols, derive_seed(seed, {2, b})));
    }
    std::vector<double> y(rows);

    const std::size_t S = sparsity_grid.size();
    // Precomputed kept-index lists per (method, sparsity, token).
    std::vector<std::vector<std::vector<std::size_t>>> teal_idx(S), wina_idx(S);
    std::vector<std::size_t> ks(S);
    for (std::size_t s = 0; s < S; ++s) {
        ks[s] = keep_count(sparsity_grid[s], cols);
        for (const auto& x : xs) {
            teal_idx[s].push_back(gate_magnitude(x, ks[s]).kept_indices());
            wina_idx[s].push_back(gate_wina(x, c, ks[s]).kept_indices());
        }
    }

    auto run_dense = [&] {
        for (const auto& x : xs) {
            const Vector out = dense_gemv(w, x);
            g_sink = g_sink + out[0];
        }
    };
    auto run_indexed = [&](const std::vector<std::vector<std::size_t>>& idx) {
        for (std::size_t b = 0; b < batch; ++b) {
            gather_gemv(w, xs[b].span().data(), idx[b], y.data());
            g_sink = g_sink + y[0];
        }
    };
    auto run_gated = [&](bool wina_gate, std::size_t k) {
        for (const auto& x : xs) {
            const GateMask g = wina_gate ? gate_wina(x, c, k) : gate_magnitude(x, k);
            const auto idx = g.kept_indices();
            gather_gemv(w, x.span().data(), idx, y.data());
            g_sink = g_sink + y[0];
        }
    };
    auto time_ns = [](auto&& fn) {
        const auto t0 = Clock::now();
        fn();
        return static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
    };

    for (std::size_t i = 0; i < kGemvWarmup; ++i) {
        run_dense();
        run_indexed(teal_idx[0]);
    }

    Samples dense;
    std::vector<Samples> teal(S), wina(S);
    for (std::size_t r = 0; r < reps; ++r) {
        dense.plain.push_back(time_ns(run_dense));
        for (std::size_t s = 0; s < S; ++s) {
            // Alternate which variant goes first so neither gets a systematic cache advantage.
            if (r % 2 == 0) {
                teal[s].plain.push_back(time_ns([&] { run_indexed(teal_idx[s]); }));
                wina[s].plain.push_back(time_ns([&] { run_indexed(wina_idx[s]); }));
            } else {
                wina[s].plain.push_back(time_ns([&] { run_indexed(wina_idx[s]); }));
                teal[s].plain.push_back(time_ns([&] { run_indexed(teal_idx[s]); }));
            }
            teal[s].with_gate.push_back(time_ns([&] { run_gated(false, ks[s]); }));
            wina[s].with_gate.push_back(time_ns([&] { run_gated(true, ks[s]); }));
        }
    }

    LatencyReport report;
    report.rows = rows;
    report.cols = cols;
    report.batch = batch;
    report.sparsity_grid.assign(sparsity_grid.begin(), sparsity_grid.end());
    report.reps = reps;
    report.warmup = kGemvWarmup;
    report.seed = seed;

    const double dense_median = quantile(dense.plain, 0.5);
    LatencyRow d;
    d.variant = "dense";
    d.sparsity = 0.0;
    d.batch = batch;
    d.median_ns = dense_median;
    d.p10_ns = quantile(dense.plain, 0.1);
    d.p90_ns = quantile(dense.plain, 0.9);
    d.median_with_gate_ns = dense_median;
    report.results.push_back(d);
    for (const char* variant : {"teal", "wina"}) {
        const auto& samples = std::string(variant) == "teal" ? teal : wina;
        for (std::size_t s = 0; s < S; ++s) {
            LatencyRow row;
            row.variant = variant;
            row.sparsity = sparsity_grid[s];
            row.batch = batch;
            row.median_ns = quantile(samples[s].plain, 0.5);
            row.p10_ns = quantile(samples[s].plain, 0.1);
            row.p90_ns = quantile(samples[s].plain, 0.9);
            row.speedup = dense_median / row.median_ns;
            row.median_with_gate_ns = quantile(samples[s].with_gate, 0.5);
            row.speedup_with_gate = dense_median / row.median_with_gate_ns;
            report.results.push_back(row);
        }
    }
    return report;
}

std::string to_csv(const LatencyReport& report) {
    std::ostringstream out;
    out << "variant,sparsity,batch,median_ns,p10_ns,p90_ns,speedup,median_with_gate_ns,speedup_with_gate\n";
    out << std::setprecision(10);
    for (const auto& r : report.results) {
        out << r.variant << ',' << r.sparsity << ',' << r.batch << ',' << r.median_ns << ',' << r.p10_ns << ','
            << r.p90_ns << ',' << r.speedup << ',' << r.median_with_gate_ns << ',' << r.speedup_with_gate << '\n';
    }
    return out.str();
}

std::string format_table(const LatencyReport& report) {
    std::ostringstream out;
    out << "shape " << report.rows << "x" << report.cols << "  batch " << report.batch << "  reps " << report.reps
        << "  warmup " << report.warmup << "  seed " << report.seed << '\n';
    out << std::left << std::setw(8) << "variant" << std::right << std::setw(10) << "sparsity" << std::setw(14)
        << "median(us)" << std::setw(12) << "p10(us)" << std::setw(12) << "p90(us)" << std::setw(10) << "speedup"
        << std::setw(16) << "w/ gate(us)" << std::setw(12) << "speedup" << '\n';
    out << std::fixed;
    for (const auto& r : report.results) {
        out << std::left << std::setw(8) << r.variant << std::right << std::setprecision(2) << std::setw(10)
            << r.sparsity << std::setprecision(1) << std::setw(14) << r.median_ns / 1e3 << std::setw(12)
            << r.p10_ns / 1e3 << std::setw(12) << r.p90_ns / 1e3 << std::setprecision(3) << std::setw(10)
            << r.speedup << std::setprecision(1) << std::setw(16) << r.median_with_gate_ns / 1e3
            << std::setprecision(3) << std::setw(12) << r.speedup_with_gate << '\n';
    }
    return out.str();
}

} // namespace wina
