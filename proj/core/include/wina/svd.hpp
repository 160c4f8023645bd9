// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "wina/linalg.hpp"

namespace wina {

/// Thin SVD: w = u * diag(sigma) * v^T with k = min(rows, cols).
///
/// sigma is non-increasing and non-negative; u^T u = v^T v = I_k.
/// Sign convention: the first non-negligible entry of every column of v is
/// positive (the matching column of u is flipped along with it), so the
/// factorization is unique for distinct singular values.
struct SvdResult {
    Matrix u;     // rows x k
    Vector sigma; // k
    Matrix v;     // cols x k
};

/// Throws NumericFailure if the decomposition cannot meet its accuracy contract
/// (reconstruction or orthogonality), carrying the observed residual.
SvdResult svd(const Matrix& w);

/// Square orthogonal cols x cols factor whose leading k columns are the right
/// singular vectors of w. For wide matrices the remaining columns complete an
/// orthonormal basis of the null space (deterministically, by Gram-Schmidt
/// against the standard basis). w * result has mutually orthogonal columns.
Matrix right_orthogonal_factor(const Matrix& w);
Matrix right_orthogonal_factor(const SvdResult& svd, std::size_t cols);

/// Max |q^T q - I|.
double orthogonality_defect(const Matrix& q);

} // namespace wina
