// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "wina/gating.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wina/errors.hpp"
#include "wina/svd.hpp"

namespace wina {

GateMask::GateMask(std::vector<std::uint8_t> keep) : keep_(std::move(keep)) {
    for (auto& b : keep_) {
        b = b != 0 ? 1 : 0;
        k_ += b;
    }
}

GateMask GateMask::all(std::size_t n) {
    return GateMask(std::vector<std::uint8_t>(n, 1));
}

GateMask GateMask::none(std::size_t n) {
    return GateMask(std::vector<std::uint8_t>(n, 0));
}

GateMask GateMask::from_indices(std::size_t n, const std::vector<std::size_t>& kept) {
    std::vector<std::uint8_t> bits(n, 0);
    for (std::size_t i : kept) {
        if (i >= n) {
            throw InvalidInput("GateMask::from_indices: index " + std::to_string(i) + " >= " + std::to_string(n));
        }
        bits[i] = 1;
    }
    return GateMask(std::move(bits));
}

std::vector<std::size_t> GateMask::kept_indices() const {
    std::vector<std::size_t> out;
    out.reserve(k_);
    for (std::size_t i = 0; i < keep_.size(); ++i) {
        if (keep_[i]) {
            out.push_back(i);
        }
    }
    return out;
}

std::string_view to_string(GateMethod m) noexcept {
    switch (m) {
    case GateMethod::teal:
        return "teal";
    case GateMethod::wina:
        return "wina";
    case GateMethod::rsparse:
        return "rsparse";
    }
    return "?";
}

GateMethod parse_gate_method(std::string_view name) {
    if (name == "teal" || name == "cats") {
        return GateMethod::teal;
    }
    if (name == "wina") {
        return GateMethod::wina;
    }
    if (name == "rsparse" || name == "r-sparse") {
        return GateMethod::rsparse;
    }
    throw InvalidInput("unknown gate method '" + std::string(name) + "' (expected teal, wina or rsparse)");
}

std::size_t keep_count(double sparsity, std::size_t n) {
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
        throw InvalidInput("sparsity " + std::to_string(sparsity) + " outside [0, 1]");
    }
    const double raw = std::floor((1.0 - sparsity) * static_cast<double>(n) + 0.5);
    return static_cast<std::size_t>(std::clamp(raw, 0.0, static_cast<double>(n)));
}

GateMask topk_mask(std::span<const double> scores, std::size_t k) {
    const std::size_t n = scores.size();
    if (k > n) {
        throw InvalidInput("topk_mask: k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
    }
    std::vector<std::uint8_t> bits(n, 0);
    if (k == n) {
        std::fill(bits.begin(), bits.end(), 1);
        return GateMask(std::move(bits));
    }
    if (k == 0) {
        return GateMask(std::move(bits));
    }
    struct Entry {
        double score;
        std::size_t index;
    };
    std::vector<Entry> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = {scores[i], i};
    }
    // Strict total order (score desc, index asc) makes the selection unique.
    auto before = [](const Entry& a, const Entry& b) {
        return a.score > b.score || (a.score == b.score && a.index < b.index);
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), before);
    for (std::size_t i = 0; i < k; ++i) {
        bits[order[i].index] = 1;
    }
    return GateMask(std::move(bits));
}

GateMask topk_mask(const Vector& scores, std::size_t k) {
    return topk_mask(scores.span(), k);
}

GateMask gate_magnitude(const Vector& x, std::size_t k) {
    std::vector<double> s(x.size());
    std::transform(x.begin(), x.end(), s.begin(), [](double v) { return std::abs(v); });
    return topk_mask(std::span<const double>(s), k);
}

GateMask gate_wina(const Vector& x, const Vector& c, std::size_t k) {
    if (x.size() != c.size()) {
        throw InvalidInput("gate_wina: x has length " + std::to_string(x.size()) + ", c has length " +
                           std::to_string(c.size()));
    }
    std::vector<double> s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (c[i] < 0.0) {
            throw InvalidInput("gate_wina: negative column norm at index " + std::to_string(i));
        }
        s[i] = std::abs(x[i] * c[i]);
    }
    return topk_mask(std::span<const double>(s), k);
}

Vector apply_gate(const Vector& x, const GateMask& g) {
    if (x.size() != g.n()) {
        throw InvalidInput("apply_gate: x has length " + std::to_string(x.size()) + ", mask has length " +
                           std::to_string(g.n()));
    }
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (g.keeps(i)) {
            out[i] = x[i];
        }
    }
    return out;
}

LowRankFactors lowrank_factors(const Matrix& w, std::size_t r) {
    const std::size_t kmax = std::min(w.rows(), w.cols());
    if (r < 1 || r > kmax) {
        throw InvalidInput("lowrank_factors: rank " + std::to_string(r) + " outside [1, " + std::to_string(kmax) +
                           "]");
    }
    const SvdResult f = svd(w);
    LowRankFactors out{Matrix(w.cols(), r), Matrix(w.rows(), r), r, 0.0};
    for (std::size_t j = 0; j < r; ++j) {
        const double s = std::sqrt(f.sigma[j]);
        for (std::size_t i = 0; i < w.cols(); ++i) {
            out.a_r(i, j) = f.v(i, j) * s;
        }
        for (std::size_t i = 0; i < w.rows(); ++i) {
            out.b_r(i, j) = f.u(i, j) * s;
        }
    }
    double tail = 0.0;
    for (std::size_t j = r; j < kmax; ++j) {
        tail += f.sigma[j] * f.sigma[j];
    }
    out.residual = std::sqrt(tail);
    return out;
}

Vector rsparse_apply(const Matrix& w, const Vector& x, std::size_t k, const LowRankFactors& factors) {
    if (x.size() != w.cols()) {
        throw InvalidInput("rsparse_apply: x has length " + std::to_string(x.size()) + ", W has " +
                           std::to_string(w.cols()) + " columns");
    }
    if (factors.a_r.rows() != w.cols() || factors.b_r.rows() != w.rows() || factors.a_r.cols() != factors.r ||
        factors.b_r.cols() != factors.r) {
        throw InvalidInput("rsparse_apply: low-rank factors do not match W");
    }
    const GateMask g = gate_magnitude(x, k);
    const Vector x_hat = apply_gate(x, g);
    Vector y = matvec(w, x_hat);
    if (k == x.size() || factors.r == 0) {
        return y;
    }
    // v = a_r^T (x - x_hat), touching only dropped rows of a_r.
    std::vector<double> v(factors.r, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (g.keeps(i)) {
            continue;
        }
        const auto arow = factors.a_r.row(i);
        for (std::size_t j = 0; j < factors.r; ++j) {
            v[j] += x[i] * arow[j];
        }
    }
    for (std::size_t i = 0; i < w.rows(); ++i) {
        const auto brow = factors.b_r.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < factors.r; ++j) {
            acc += brow[j] * v[j];
        }
        y[i] += acc;
    }
    return y;
}

double gated_deviation(const Matrix& w, const Vector& x, const GateMask& g) {
    if (x.size() != w.cols() || g.n() != w.cols()) {
        throw InvalidInput("gated_deviation: dimension mismatch");
    }
    std::vector<double> e(w.rows(), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i) {
        const auto row = w.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (!g.keeps(j)) {
                acc += row[j] * x[j];
            }
        }
        e[i] = acc;
    }
    return norm2(e);
}

} // namespace wina
