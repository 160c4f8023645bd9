// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "wina/svd.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "wina/errors.hpp"

namespace wina {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Entries below this magnitude do not fix a column's sign.
constexpr double kSignThreshold = 1e-12;

Matrix to_matrix(const Eigen::MatrixXd& m) {
    Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
        }
    }
    return out;
}

} // namespace

SvdResult svd(const Matrix& w) {
    if (w.rows() == 0 || w.cols() == 0) {
        throw InvalidInput("svd: empty matrix");
    }
    require_finite(w.data(), "svd input");

    const Eigen::Map<const RowMajor> map(w.data().data(), static_cast<Eigen::Index>(w.rows()),
                                         static_cast<Eigen::Index>(w.cols()));
    // BDCSVD switches to two-sided Jacobi below 16 columns; both paths are
    // deterministic for a fixed input.
    Eigen::BDCSVD<Eigen::MatrixXd> solver(Eigen::MatrixXd(map), Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success) {
        throw NumericFailure("svd: decomposition did not converge", std::nan(""));
    }

    Eigen::MatrixXd u = solver.matrixU();
    Eigen::MatrixXd v = solver.matrixV();
    Eigen::VectorXd s = solver.singularValues();

    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            if (std::abs(v(r, c)) > kSignThreshold) {
                if (v(r, c) < 0.0) {
                    v.col(c) *= -1.0;
                    u.col(c) *= -1.0;
                }
                break;
            }
        }
    }

    SvdResult out{to_matrix(u), Vector(static_cast<std::size_t>(s.size())), to_matrix(v)};
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        out.sigma[static_cast<std::size_t>(i)] = std::max(0.0, s(i));
    }
    for (std::size_t i = 1; i < out.sigma.size(); ++i) {
        if (out.sigma[i] > out.sigma[i - 1]) {
            throw NumericFailure("svd: singular values not sorted", out.sigma[i] - out.sigma[i - 1]);
        }
    }
    return out;
}

Matrix right_orthogonal_factor(const SvdResult& factors, std::size_t cols) {
    const std::size_t k = factors.v.cols();
    if (factors.v.rows() != cols) {
        throw InvalidInput("right_orthogonal_factor: v has " + std::to_string(factors.v.rows()) +
                           " rows, expected " + std::to_string(cols));
    }
    // Column-major working copy of the basis.
    std::vector<std::vector<double>> basis;
    basis.reserve(cols);
    for (std::size_t j = 0; j < k; ++j) {
        basis.push_back(factors.v.column(j).data());
    }
    // Complete with standard basis vectors, two passes of modified Gram-Schmidt each.
    for (std::size_t e = 0; e < cols && basis.size() < cols; ++e) {
        std::vector<double> cand(cols, 0.0);
        cand[e] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                const double p = dot(b, cand);
                for (std::size_t i = 0; i < cols; ++i) {
                    cand[i] -= p * b[i];
                }
            }
        }
        const double nrm = norm2(cand);
        if (nrm < 1e-6) {
            continue;
        }
        for (double& c : cand) {
            c /= nrm;
        }
        basis.push_back(std::move(cand));
    }
    if (basis.size() != cols) {
        throw NumericFailure("right_orthogonal_factor: could not complete the basis",
                             static_cast<double>(cols - basis.size()));
    }
    Matrix q(cols, cols);
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < cols; ++i) {
            q(i, j) = basis[j][i];
        }
    }
    return q;
}

Matrix right_orthogonal_factor(const Matrix& w) {
    return right_orthogonal_factor(svd(w), w.cols());
}

double orthogonality_defect(const Matrix& q) {
    double worst = 0.0;
    for (std::size_t i = 0; i < q.cols(); ++i) {
        for (std::size_t j = i; j < q.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < q.rows(); ++r) {
                acc += q(r, i) * q(r, j);
            }
            worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
        }
    }
    return worst;
}

} // namespace wina
