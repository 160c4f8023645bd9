// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wina/linalg.hpp"

namespace wina {

/// Binary keep/drop vector with exactly k() ones.
class GateMask {
public:
    GateMask() = default;
    /// Any nonzero byte counts as "keep".
    explicit GateMask(std::vector<std::uint8_t> keep);

    static GateMask all(std::size_t n);
    static GateMask none(std::size_t n);
    /// Keeps exactly the listed indices.
    static GateMask from_indices(std::size_t n, const std::vector<std::size_t>& kept);

    std::size_t n() const noexcept { return keep_.size(); }
    std::size_t k() const noexcept { return k_; }
    bool keeps(std::size_t i) const noexcept { return keep_[i] != 0; }
    const std::vector<std::uint8_t>& bits() const noexcept { return keep_; }
    /// Kept indices in ascending order.
    std::vector<std::size_t> kept_indices() const;

    bool operator==(const GateMask&) const = default;

private:
    std::vector<std::uint8_t> keep_;
    std::size_t k_ = 0;
};

enum class GateMethod { teal, wina, rsparse };

std::string_view to_string(GateMethod m) noexcept;
/// Accepts "teal", "cats" (alias of teal), "wina", "rsparse"/"r-sparse".
GateMethod parse_gate_method(std::string_view name);

/// K = clamp(round_half_up((1 - sparsity) * n), 0, n). Sparsity must lie in [0, 1].
std::size_t keep_count(double sparsity, std::size_t n);

/// Keeps the k largest scores; equal scores resolve to the lower index.
GateMask topk_mask(std::span<const double> scores, std::size_t k);
GateMask topk_mask(const Vector& scores, std::size_t k);

/// Magnitude gating (TEAL/CATS): top-k of |x|.
GateMask gate_magnitude(const Vector& x, std::size_t k);

/// Weight-informed gating: top-k of |x_i * c_i|, with c the column norms of the
/// consuming matrix.
GateMask gate_wina(const Vector& x, const Vector& c, std::size_t k);

/// Zeroes the dropped coordinates.
Vector apply_gate(const Vector& x, const GateMask& g);

/// Rank-r factors of w^T: a_r * b_r^T is the best rank-r approximation of w^T.
struct LowRankFactors {
    Matrix a_r; // n_in x r,  V_r * diag(sqrt(sigma_r))
    Matrix b_r; // n_out x r, U_r * diag(sqrt(sigma_r))
    std::size_t r = 0;
    /// ||a_r b_r^T - w^T||_F, i.e. sqrt of the dropped sigma^2 tail.
    double residual = 0.0;
};

LowRankFactors lowrank_factors(const Matrix& w, std::size_t r);

/// Sparse-input branch plus low-rank residual: W x_hat + b_r (a_r^T (x - x_hat)),
/// with x_hat the magnitude-gated input.
Vector rsparse_apply(const Matrix& w, const Vector& x, std::size_t k, const LowRankFactors& factors);

/// ||W x - W (g . x)||_2, accumulated only over dropped columns.
double gated_deviation(const Matrix& w, const Vector& x, const GateMask& g);

} // namespace wina
