// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "wina/gating.hpp"
#include "wina/linalg.hpp"

namespace wina {

enum class Activation { linear, silu };

std::string_view to_string(Activation a) noexcept;
Activation parse_activation(std::string_view name);

/// Ordered stack of weight matrices W^(1..L); layer l maps R^{cols} -> R^{rows}
/// and cols(W^(l+1)) == rows(W^(l)). The activation is applied between layers,
/// never after the last one.
class LinearChain {
public:
    LinearChain() = default;
    LinearChain(std::vector<Matrix> layers, Activation activation = Activation::linear);

    std::size_t depth() const noexcept { return layers_.size(); }
    const Matrix& layer(std::size_t l) const { return layers_.at(l); }
    const std::vector<Matrix>& layers() const noexcept { return layers_; }
    Activation activation() const noexcept { return activation_; }

    std::size_t input_dim() const { return layers_.front().cols(); }
    std::size_t output_dim() const { return layers_.back().rows(); }
    /// Sum of rows * cols over layers.
    std::size_t parameter_count() const;

    Vector forward(const Vector& x) const;
    /// y_g^(l) = W^(l) (g^(l) . act(y_g^(l-1))): every layer consumes its gated input.
    Vector forward_gated(const Vector& x, std::span<const GateMask> gates) const;
    /// Dense activations entering each layer (after the activation), one per layer.
    std::vector<Vector> layer_inputs(const Vector& x) const;

private:
    std::vector<Matrix> layers_;
    Activation activation_ = Activation::linear;
};

/// Random chain with dims {n_0, ..., n_L}, Kaiming-initialized layers.
LinearChain random_chain(std::span<const std::size_t> dims, Activation activation, std::uint64_t seed);

} // namespace wina
