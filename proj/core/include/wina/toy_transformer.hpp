// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "wina/gating.hpp"
#include "wina/linalg.hpp"

namespace wina {

/// The seven GEMVs of a decoder block, in evaluation order.
enum class BlockSlot : std::size_t { q, k, v, o, gate, up, down };

inline constexpr std::array<BlockSlot, 7> kBlockSlots{BlockSlot::q,    BlockSlot::k,  BlockSlot::v,   BlockSlot::o,
                                                      BlockSlot::gate, BlockSlot::up, BlockSlot::down};

std::string_view to_string(BlockSlot s) noexcept;

/// Single pre-norm decoder block with causal multi-head attention and a SwiGLU
/// MLP, plus token embedding and output head.
///
/// Hidden states are column vectors of length d:
///   x1 = S x + W_o attn(rmsnorm(x))
///   y  = x1 + W_down (silu(W_gate n) . (W_up n)),   n = rmsnorm(x1)
///   logits = W_head rmsnorm(y)
/// S is attn_residual (identity when absent). It only appears after
/// orthogonalize_block, which rotates the attention and MLP input streams by
/// different orthogonal bases and has to carry the change of basis along the
/// skip connection. RMSNorm has unit scale throughout.
struct ToyDecoderBlock {
    std::size_t d = 0;
    std::size_t m = 0;
    std::size_t heads = 1;
    Matrix w_q, w_k, w_v, w_o; // d x d
    Matrix w_gate, w_up;       // m x d
    Matrix w_down;             // d x m
    Matrix w_emb;              // vocab x d
    Matrix w_head;             // vocab x d
    std::optional<Matrix> attn_residual;

    std::size_t vocab() const noexcept { return w_emb.rows(); }
    const Matrix& slot(BlockSlot s) const;
    Matrix& slot(BlockSlot s);

    /// Throws InvalidInput on inconsistent shapes or d % heads != 0.
    void validate() const;
};

/// Kaiming-initialized block; embedding rows are standard normal.
ToyDecoderBlock random_block(std::size_t d, std::size_t m, std::size_t heads, std::size_t vocab,
                             std::uint64_t seed);

/// Every weight (including embedding and head) is the identity; requires m == d == vocab.
ToyDecoderBlock identity_block(std::size_t d, std::size_t heads);

/// T x d hidden states.
struct TokenBatch {
    Matrix x;
    std::size_t t() const noexcept { return x.rows(); }
};

/// Per-token top-k gating rule for one slot; WINA scores use that slot's column norms.
struct TopKRule {
    GateMethod method = GateMethod::teal;
    std::size_t k = 0;
};

/// Either a fixed mask shared by all tokens or a per-token top-k rule.
using SlotGate = std::variant<GateMask, TopKRule>;

struct BlockGating {
    std::array<std::optional<SlotGate>, 7> slots;

    SlotGate* operator[](BlockSlot s) {
        auto& g = slots[static_cast<std::size_t>(s)];
        return g ? &*g : nullptr;
    }
    const SlotGate* operator[](BlockSlot s) const {
        const auto& g = slots[static_cast<std::size_t>(s)];
        return g ? &*g : nullptr;
    }

    /// The same top-k rule at the given sparsity on all seven slots.
    static BlockGating uniform(const ToyDecoderBlock& block, GateMethod method, double sparsity);
    /// Per-slot sparsities in kBlockSlots order.
    static BlockGating per_slot(const ToyDecoderBlock& block, GateMethod method, std::span<const double> sparsity);
};

/// Everything the forward pass computed, for tests and calibration.
struct BlockTrace {
    /// Input vectors seen by each slot (before gating), one per token.
    std::array<std::vector<Vector>, 7> slot_inputs;
    /// attention[head] is the T x T probability matrix.
    std::vector<Matrix> attention;
};

/// Unit-scale RMSNorm: x / sqrt(mean(x^2) + 1e-6).
Vector rmsnorm(const Vector& x);

inline constexpr double kRmsNormEps = 1e-6;

TokenBatch block_forward(const ToyDecoderBlock& block, const TokenBatch& x, const BlockGating* gating = nullptr,
                         BlockTrace* trace = nullptr);

/// Embeds token ids, runs the block, applies the final norm and head: T x vocab logits.
Matrix model_forward(const ToyDecoderBlock& block, std::span<const std::size_t> tokens,
                     const BlockGating* gating = nullptr);

/// Parameter count (rows * cols) of each slot's matrix, kBlockSlots order.
std::array<std::size_t, 7> slot_parameters(const ToyDecoderBlock& block);

} // namespace wina
