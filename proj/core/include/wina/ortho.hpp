// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "wina/chain.hpp"
#include "wina/linalg.hpp"
#include "wina/random.hpp"
#include "wina/toy_transformer.hpp"

namespace wina {

/// Max absolute off-diagonal entry of w^T w (zero iff columns are mutually orthogonal).
double verify_column_orthogonality(const Matrix& w);

struct OrthoResult {
    LinearChain chain;
    /// Present when layer 1 was also rotated; feed input_rotation^T x to the new chain.
    std::optional<Matrix> input_rotation;
    /// Max Gram off-diagonal of every transformed layer.
    Vector per_layer_gram_offdiag;
};

/// Makes layers 2..L column-orthogonal without changing the chain's function.
///
/// Walks top-down: W^(l) <- W^(l) V and W^(l-1) <- V^T W^(l-1), where V is the
/// square right factor of the current W^(l). Left multiplication never disturbs
/// a Gram that is already diagonal, so a single pass suffices. With
/// rotate_input the first layer is rotated too and its V is returned as the
/// input rotation. Only linear chains are accepted: the compensation
/// V V^T = I has to pass through the inter-layer map unchanged.
OrthoResult orthogonalize_chain(const LinearChain& chain, bool rotate_input);

/// Applies the input rotation when present, then runs the chain.
Vector forward_transformed(const OrthoResult& result, const Vector& x);

/// Rotates the block so W_k and W_gate become column-orthogonal while the
/// token -> logits map is preserved.
///
/// With V_a the right factor of W_k and V_m that of W_gate:
///   W_emb, W_q, W_k, W_v <- W V_a        (attention input stream in basis V_a)
///   W_o, W_down          <- V_m^T W      (residual stream leaves in basis V_m)
///   W_gate, W_up, W_head <- W V_m
///   S                    <- V_m^T S V_a  (skip connection changes basis)
/// This is the usual single-block orthogonal transformation with two
/// bookkeeping fixes: the head absorbs the final rotation, and the attention
/// skip path carries the V_a -> V_m basis change, which a residual stream needs
/// for the identity to hold exactly. RMSNorm commutes with both rotations
/// because it has unit scale.
ToyDecoderBlock orthogonalize_block(const ToyDecoderBlock& block);

/// Slots whose Gram orthogonalize_block diagonalizes.
inline constexpr std::array<BlockSlot, 2> kOrthoTargets{BlockSlot::k, BlockSlot::gate};

/// max over sampled inputs of ||f(x) - g(x)|| / (1 + ||f(x)||).
/// Throws InvalidInput when the two outputs differ in length.
template <class Input, std::invocable<Rng&> Sampler>
double verify_invariance(const std::function<Vector(const Input&)>& original,
                         const std::function<Vector(const Input&)>& transformed, Sampler&& sample,
                         std::size_t n_inputs, std::uint64_t seed);

double verify_invariance(const std::function<Vector(const Vector&)>& original,
                         const std::function<Vector(const Vector&)>& transformed, std::size_t input_dim,
                         std::size_t n_inputs, std::uint64_t seed);

/// Relative deviation measure used by verify_invariance.
double relative_deviation(const Vector& reference, const Vector& candidate);

template <class Input, std::invocable<Rng&> Sampler>
double verify_invariance(const std::function<Vector(const Input&)>& original,
                         const std::function<Vector(const Input&)>& transformed, Sampler&& sample,
                         std::size_t n_inputs, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t i = 0; i < n_inputs; ++i) {
        const Input x = sample(rng);
        worst = std::max(worst, relative_deviation(original(x), transformed(x)));
    }
    return worst;
}

} // namespace wina
