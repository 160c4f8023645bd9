// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "wina/linalg.hpp"
#include "wina/random.hpp"
#include "wina/svd.hpp"

namespace wina::test {

/// Straight-line reference product, independent of the library's matvec.
inline std::vector<double> ref_matvec(const Matrix& w, const std::vector<double>& x) {
    std::vector<double> y(w.rows(), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            y[i] += w(i, j) * x[j];
        }
    }
    return y;
}

inline double ref_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) {
        s += e * e;
    }
    return std::sqrt(s);
}

inline double ref_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(s);
}

inline double frob_diff(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            s += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
        }
    }
    return std::sqrt(s);
}

inline Matrix column_orthogonal(std::size_t m, std::size_t n, std::uint64_t seed) {
    const Matrix w = kaiming_init(m, n, seed);
    return matmul(w, right_orthogonal_factor(w));
}

} // namespace wina::test
