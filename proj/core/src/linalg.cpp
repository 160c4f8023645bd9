// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "wina/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wina/errors.hpp"

namespace wina {

namespace {

std::string dims(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

} // namespace

void require_finite(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw InvalidInput(std::string(what) + ": non-finite entry at index " + std::to_string(i));
        }
    }
}

Vector::Vector(std::size_t n, double fill) : data_(n, fill) {
    require_finite(std::span<const double>(&fill, 1), "Vector");
}

Vector::Vector(std::vector<double> data) : data_(std::move(data)) {
    require_finite(data_, "Vector");
}

Vector::Vector(std::initializer_list<double> values) : data_(values) {
    require_finite(data_, "Vector");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    require_finite(std::span<const double>(&fill, 1), "Matrix");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw InvalidInput("Matrix: " + dims(rows, cols) + " needs " + std::to_string(rows * cols) +
                           " entries, got " + std::to_string(data_.size()));
    }
    require_finite(data_, "Matrix");
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw InvalidInput("Matrix::from_rows: ragged rows");
        }
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::diagonal(const Vector& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        m(i, i) = d[i];
    }
    return m;
}

Vector Matrix::column(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        out[i] = (*this)(i, j);
    }
    return Vector(std::move(out));
}

Vector matvec(const Matrix& w, const Vector& x) {
    if (x.size() != w.cols()) {
        throw InvalidInput("matvec: matrix " + dims(w.rows(), w.cols()) + " vs vector of length " +
                           std::to_string(x.size()));
    }
    std::vector<double> y(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        const auto row = w.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            acc += row[j] * x[j];
        }
        y[i] = acc;
    }
    return Vector(std::move(y));
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw InvalidInput("matmul: " + dims(a.rows(), a.cols()) + " * " + dims(b.rows(), b.cols()));
    }
    Matrix c(a.rows(), b.cols());
    // i-k-j order keeps the inner loop contiguous in both b and c.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto crow = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            const auto brow = b.row(k);
            for (std::size_t j = 0; j < crow.size(); ++j) {
                crow[j] += aik * brow[j];
            }
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            t(j, i) = a(i, j);
        }
    }
    return t;
}

Vector column_norms(const Matrix& w) {
    std::vector<double> sq(w.cols(), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i) {
        const auto row = w.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            sq[j] += row[j] * row[j];
        }
    }
    for (double& s : sq) {
        s = std::sqrt(s);
    }
    return Vector(std::move(sq));
}

namespace {

Matrix gram(const Matrix& w) {
    Matrix g(w.cols(), w.cols());
    for (std::size_t r = 0; r < w.rows(); ++r) {
        const auto row = w.row(r);
        for (std::size_t i = 0; i < row.size(); ++i) {
            const double wi = row[i];
            if (wi == 0.0) {
                continue;
            }
            auto grow = g.row(i);
            for (std::size_t j = i; j < row.size(); ++j) {
                grow[j] += wi * row[j];
            }
        }
    }
    return g;
}

} // namespace

double gram_offdiag_max(const Matrix& w) {
    const Matrix g = gram(w);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = i + 1; j < g.cols(); ++j) {
            worst = std::max(worst, std::abs(g(i, j)));
        }
    }
    return worst;
}

double gram_diag_max(const Matrix& w) {
    double worst = 0.0;
    for (double c : column_norms(w)) {
        worst = std::max(worst, c * c);
    }
    return worst;
}

double silu(double z) noexcept {
    // z * sigmoid(z), written to avoid exp overflow for large |z|.
    if (z >= 0.0) {
        return z / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return z * e / (1.0 + e);
}

Vector silu(const Vector& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double z) { return silu(z); });
    return Vector(std::move(out));
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InvalidInput("dot: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double norm2(std::span<const double> a) {
    double acc = 0.0;
    for (double v : a) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

double l2_deviation(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw InvalidInput("l2_deviation: lengths " + std::to_string(a.size()) + " and " +
                           std::to_string(b.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

Vector operator-(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw InvalidInput("vector subtraction: length mismatch");
    }
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return Vector(std::move(out));
}

Vector operator+(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw InvalidInput("vector addition: length mismatch");
    }
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + b[i];
    }
    return Vector(std::move(out));
}

Vector operator*(double s, const Vector& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = s * v[i];
    }
    return Vector(std::move(out));
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidInput("max_abs_diff: " + dims(a.rows(), a.cols()) + " vs " + dims(b.rows(), b.cols()));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

double max_abs(const Matrix& a) {
    double worst = 0.0;
    for (double v : a.data()) {
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

double frobenius_norm(const Matrix& a) {
    return norm2(a.data());
}

} // namespace wina
