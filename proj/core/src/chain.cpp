// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "wina/chain.hpp"

#include <string>

#include "wina/errors.hpp"
#include "wina/random.hpp"

namespace wina {

std::string_view to_string(Activation a) noexcept {
    return a == Activation::linear ? "linear" : "silu";
}

Activation parse_activation(std::string_view name) {
    if (name == "linear") {
        return Activation::linear;
    }
    if (name == "silu") {
        return Activation::silu;
    }
    throw InvalidInput("unknown activation '" + std::string(name) + "' (expected linear or silu)");
}

LinearChain::LinearChain(std::vector<Matrix> layers, Activation activation)
    : layers_(std::move(layers)), activation_(activation) {
    if (layers_.empty()) {
        throw InvalidInput("LinearChain: at least one layer required");
    }
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (layers_[l].rows() == 0 || layers_[l].cols() == 0) {
            throw InvalidInput("LinearChain: layer " + std::to_string(l) + " is empty");
        }
        if (l > 0 && layers_[l].cols() != layers_[l - 1].rows()) {
            throw InvalidInput("LinearChain: layer " + std::to_string(l) + " expects " +
                               std::to_string(layers_[l].cols()) + " inputs but layer " + std::to_string(l - 1) +
                               " produces " + std::to_string(layers_[l - 1].rows()));
        }
    }
}

std::size_t LinearChain::parameter_count() const {
    std::size_t total = 0;
    for (const auto& w : layers_) {
        total += w.rows() * w.cols();
    }
    return total;
}

Vector LinearChain::forward(const Vector& x) const {
    Vector h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (l > 0 && activation_ == Activation::silu) {
            h = silu(h);
        }
        h = matvec(layers_[l], h);
    }
    return h;
}

Vector LinearChain::forward_gated(const Vector& x, std::span<const GateMask> gates) const {
    if (gates.size() != layers_.size()) {
        throw InvalidInput("forward_gated: " + std::to_string(gates.size()) + " gates for " +
                           std::to_string(layers_.size()) + " layers");
    }
    Vector h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (l > 0 && activation_ == Activation::silu) {
            h = silu(h);
        }
        h = matvec(layers_[l], apply_gate(h, gates[l]));
    }
    return h;
}

std::vector<Vector> LinearChain::layer_inputs(const Vector& x) const {
    std::vector<Vector> inputs;
    inputs.reserve(layers_.size());
    Vector h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (l > 0 && activation_ == Activation::silu) {
            h = silu(h);
        }
        inputs.push_back(h);
        h = matvec(layers_[l], h);
    }
    return inputs;
}

LinearChain random_chain(std::span<const std::size_t> dims, Activation activation, std::uint64_t seed) {
    if (dims.size() < 2) {
        throw InvalidInput("random_chain: need at least two dimensions");
    }
    std::vector<Matrix> layers;
    for (std::size_t l = 1; l < dims.size(); ++l) {
        if (dims[l] == 0 || dims[l - 1] == 0) {
            throw InvalidInput("random_chain: dimensions must be positive");
        }
        layers.push_back(kaiming_init(dims[l], dims[l - 1], derive_seed(seed, {0x4C41594552ULL, l})));
    }
    return LinearChain(std::move(layers), activation);
}

} // namespace wina
