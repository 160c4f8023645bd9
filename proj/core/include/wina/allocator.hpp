// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wina/chain.hpp"
#include "wina/gating.hpp"
#include "wina/linalg.hpp"
#include "wina/toy_transformer.hpp"

namespace wina {

inline constexpr double kDefaultAllocStep = 0.05;
inline constexpr double kDefaultMaxSparsity = 0.95;

struct AllocationPlan {
    std::vector<double> per_layer_sparsity;
    /// Parameter-weighted mean of per_layer_sparsity.
    double global_achieved = 0.0;
    double step = kDefaultAllocStep;
    double target = 0.0;
    GateMethod method = GateMethod::wina;
    /// Parameter count of each layer, used for the weighting.
    std::vector<std::size_t> parameters;
};

/// Mean ||Wx - W(g . x)||_2 over the calibration inputs at each grid sparsity.
/// For rsparse the deviation is that of rsparse_apply at the given rank.
std::vector<double> layer_error_profile(const Matrix& w, std::span<const Vector> calib_inputs,
                                        std::span<const double> sparsity_grid, GateMethod method,
                                        std::size_t rsparse_rank = 16);

/// Greedy over precomputed profiles. profiles[l][i] is layer l's cost at
/// sparsity i * step, for i = 0 .. floor(max_sparsity / step). Each round
/// raises by one step the layer whose increment adds the least cost per
/// parameter among those that keep the weighted mean at or below target; it
/// stops when no increment fits. Ties go to the lowest layer index.
///
/// The result is then refined by single-step exchanges between layers that
/// lower the summed cost without lowering the weighted mean or exceeding the
/// target. When target
/// is a multiple of step, the uniform plan is refined the same way and kept
/// if strictly cheaper, so the plan never costs more than uniform.
AllocationPlan greedy_allocate_profiles(std::span<const std::vector<double>> profiles,
                                        std::span<const std::size_t> parameters, double target, double step,
                                        double max_sparsity = kDefaultMaxSparsity);

/// Profiles every layer on the dense activations that reach it (calibration
/// inputs propagated through the dense chain), then runs the greedy.
AllocationPlan greedy_allocate(const LinearChain& chain, std::span<const Vector> calib_inputs, double target,
                               double step, GateMethod method, double max_sparsity = kDefaultMaxSparsity,
                               std::size_t rsparse_rank = 16);

/// The slot inputs of a toy block on a token batch serve as calibration for
/// its seven GEMVs (kBlockSlots order).
AllocationPlan allocate_block(const ToyDecoderBlock& block, const TokenBatch& calib, double target, double step,
                              GateMethod method, double max_sparsity = kDefaultMaxSparsity);

/// Sizes of a step grid 0, step, ..., up to max_sparsity.
std::vector<double> step_grid(double step, double max_sparsity);

/// Sum over layers of the mean calibration deviation at the plan's sparsities.
double plan_total_deviation(const LinearChain& chain, std::span<const Vector> calib_inputs,
                            std::span<const double> per_layer_sparsity, GateMethod method,
                            std::size_t rsparse_rank = 16);

std::string to_json(const AllocationPlan& plan);
AllocationPlan allocation_plan_from_json(const std::string& text);

} // namespace wina
