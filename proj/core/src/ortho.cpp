// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "wina/ortho.hpp"

#include <string>

#include "wina/errors.hpp"
#include "wina/svd.hpp"

namespace wina {

double verify_column_orthogonality(const Matrix& w) {
    return gram_offdiag_max(w);
}

OrthoResult orthogonalize_chain(const LinearChain& chain, bool rotate_input) {
    if (chain.activation() != Activation::linear) {
        throw InvalidInput(
            "orthogonalize_chain: only linear chains preserve their function under V V^T compensation; "
            "use orthogonalize_block for blocks with nonlinearities");
    }
    std::vector<Matrix> layers = chain.layers();
    const std::size_t L = layers.size();
    for (std::size_t l = L; l-- > 1;) {
        const Matrix v = right_orthogonal_factor(layers[l]);
        layers[l] = matmul(layers[l], v);
        layers[l - 1] = matmul(transpose(v), layers[l - 1]);
    }
    std::optional<Matrix> input_rotation;
    if (rotate_input) {
        Matrix v = right_orthogonal_factor(layers[0]);
        layers[0] = matmul(layers[0], v);
        input_rotation = std::move(v);
    }
    Vector offdiag(L);
    for (std::size_t l = 0; l < L; ++l) {
        offdiag[l] = gram_offdiag_max(layers[l]);
    }
    return OrthoResult{LinearChain(std::move(layers), chain.activation()), std::move(input_rotation),
                       std::move(offdiag)};
}

Vector forward_transformed(const OrthoResult& result, const Vector& x) {
    if (result.input_rotation) {
        return result.chain.forward(matvec(transpose(*result.input_rotation), x));
    }
    return result.chain.forward(x);
}

ToyDecoderBlock orthogonalize_block(const ToyDecoderBlock& block) {
    block.validate();
    const Matrix va = right_orthogonal_factor(block.w_k);
    const Matrix vm = right_orthogonal_factor(block.w_gate);
    const Matrix vm_t = transpose(vm);

    ToyDecoderBlock out = block;
    out.w_emb = matmul(block.w_emb, va);
    out.w_q = matmul(block.w_q, va);
    out.w_k = matmul(block.w_k, va);
    out.w_v = matmul(block.w_v, va);
    out.w_o = matmul(vm_t, block.w_o);
    out.w_gate = matmul(block.w_gate, vm);
    out.w_up = matmul(block.w_up, vm);
    out.w_down = matmul(vm_t, block.w_down);
    out.w_head = matmul(block.w_head, vm);
    const Matrix skip = block.attn_residual ? *block.attn_residual : Matrix::identity(block.d);
    out.attn_residual = matmul(vm_t, matmul(skip, va));
    return out;
}

double relative_deviation(const Vector& reference, const Vector& candidate) {
    if (reference.size() != candidate.size()) {
        throw InvalidInput("verify_invariance: outputs have lengths " + std::to_string(reference.size()) + " and " +
                           std::to_string(candidate.size()));
    }
    return l2_deviation(reference, candidate) / (1.0 + norm2(reference.span()));
}

double verify_invariance(const std::function<Vector(const Vector&)>& original,
                         const std::function<Vector(const Vector&)>& transformed, std::size_t input_dim,
                         std::size_t n_inputs, std::uint64_t seed) {
    return verify_invariance<Vector>(
        original, transformed,
        [input_dim](Rng& rng) {
            Vector x(input_dim);
            for (double& v : x) {
                v = rng.normal();
            }
            return x;
        },
        n_inputs, seed);
}

} // namespace wina
