// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wina/gating.hpp"
#include "wina/linalg.hpp"

namespace wina {

/// Immutable column-major dense matrix; column j is contiguous. Column norms
/// are computed once on construction.
class ColMajorMatrix {
public:
    ColMajorMatrix() = default;
    /// rows x cols of zeros.
    ColMajorMatrix(std::size_t rows, std::size_t cols);
    explicit ColMajorMatrix(const Matrix& m);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const double> column(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }
    const double* data() const noexcept { return data_.data(); }
    const Vector& norms() const noexcept { return norms_; }

    Matrix to_row_major() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
    Vector norms_;
};

/// Multiply-accumulates executed by the kernels, when a counter is passed.
struct MacCounter {
    std::uint64_t macs = 0;
    std::uint64_t calls = 0;
};

/// y = sum_j x_j column_j(w), visiting columns in ascending order.
Vector dense_gemv(const ColMajorMatrix& w, const Vector& x, MacCounter* counter = nullptr);

/// y = sum over kept j of x_j column_j(w); dropped columns are never read.
Vector sparse_gemv(const ColMajorMatrix& w, const Vector& x, const GateMask& g, MacCounter* counter = nullptr);

/// Raw kernel: y (length rows) = sum over idx of x[j] column_j(w). idx must be valid column indices.
void gather_gemv(const ColMajorMatrix& w, const double* x, std::span<const std::size_t> idx, double* y,
                 MacCounter* counter = nullptr);

/// sparse_gemv(w, x, gate_wina(x, c, k)). c must match column_norms(w) within 1e-10
/// (relative), checked against the norms cached in w.
Vector wina_gated_gemv(const ColMajorMatrix& w, const Vector& x, const Vector& c, std::size_t k,
                       MacCounter* counter = nullptr);

/// Column norms of a column-major matrix (the cached values).
Vector column_norms(const ColMajorMatrix& w);

struct LatencyRow {
    std::string variant; // dense, teal, wina
    double sparsity = 0.0;
    std::size_t batch = 1;
    double median_ns = 0.0;
    double p10_ns = 0.0;
    double p90_ns = 0.0;
    double speedup = 1.0; // dense median / median
    double median_with_gate_ns = 0.0;
    double speedup_with_gate = 1.0;
};

struct LatencyReport {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t batch = 1;
    std::vector<double> sparsity_grid;
    std::size_t reps = 0;
    std::size_t warmup = 0;
    std::uint64_t seed = 0;
    std::vector<LatencyRow> results;

    const LatencyRow& at(const std::string& variant, double sparsity) const;
};

inline constexpr std::size_t kGemvWarmup = 10;
inline constexpr std::size_t kMinGemvReps = 30;

/// Times dense, TEAL-gated and WINA-gated products of a rows x cols Gaussian
/// matrix with `batch` Gaussian vectors per call. After kGemvWarmup calls,
/// each rep measures every (variant, sparsity) pair once, so slow drift hits
/// all variants alike. Gated latencies are reported both without and with the
/// time spent computing the masks.
LatencyReport bench_latency(std::size_t rows, std::size_t cols, std::size_t batch,
                            std::span<const double> sparsity_grid, std::size_t reps, std::uint64_t seed);

/// Columns: variant,sparsity,batch,median_ns,p10_ns,p90_ns,speedup,median_with_gate_ns,speedup_with_gate.
std::string to_csv(const LatencyReport& report);
std::string format_table(const LatencyReport& report);

} // namespace wina
