// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace wina {

/// Dense double-precision vector. Entries are finite on construction.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n, double fill = 0.0);
    explicit Vector(std::vector<double> data);
    Vector(std::initializer_list<double> values);

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<double> span() noexcept { return data_; }
    std::span<const double> span() const noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool operator==(const Vector&) const = default;

private:
    std::vector<double> data_;
};

/// Dense double-precision matrix stored row-major.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    /// Builds a matrix from nested row literals; all rows must have equal length.
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    Vector column(std::size_t j) const;

    const std::vector<double>& data() const noexcept { return data_; }
    std::span<double> span() noexcept { return data_; }
    std::span<const double> span() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Throws InvalidInput if any entry is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

Vector matvec(const Matrix& w, const Vector& x);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// Column-wise l2 norms: result[j] = ||w[:, j]||_2.
Vector column_norms(const Matrix& w);

/// Max absolute off-diagonal entry of w^T w.
double gram_offdiag_max(const Matrix& w);
/// Max absolute diagonal entry of w^T w.
double gram_diag_max(const Matrix& w);

Vector silu(const Vector& v);
double silu(double z) noexcept;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// Euclidean distance ||a - b||_2.
double l2_deviation(const Vector& a, const Vector& b);

Vector operator-(const Vector& a, const Vector& b);
Vector operator+(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& v);

/// Largest |a(i,j) - b(i,j)|; shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& a);
double frobenius_norm(const Matrix& a);

} // namespace wina
