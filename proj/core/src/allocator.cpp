// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "wina/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "json.hpp"
#include "wina/errors.hpp"

namespace wina {

namespace {

double profile_point(const Matrix& w, const Vector& x, double s, GateMethod method, const Vector& c,
                     const LowRankFactors* lr) {
    const std::size_t k = keep_count(s, x.size());
    switch (method) {
    case GateMethod::teal:
        return gated_deviation(w, x, gate_magnitude(x, k));
    case GateMethod::wina:
        return gated_deviation(w, x, gate_wina(x, c, k));
    case GateMethod::rsparse:
        return l2_deviation(matvec(w, x), rsparse_apply(w, x, k, *lr));
    }
    return 0.0;
}

std::size_t max_steps(double step, double max_sparsity) {
    return static_cast<std::size_t>(std::floor(max_sparsity / step + 1e-9));
}

double weighted_mean(std::span<const double> s, std::span<const std::size_t> params) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t l = 0; l < s.size(); ++l) {
        num += s[l] * static_cast<double>(params[l]);
        den += static_cast<double>(params[l]);
    }
    return den > 0.0 ? num / den : 0.0;
}

LowRankFactors factors_for(const Matrix& w, std::size_t rank) {
    const std::size_t r = std::min({rank, w.rows(), w.cols()});
    if (r == 0) {
        return LowRankFactors{Matrix(w.cols(), 0), Matrix(w.rows(), 0), 0, 0.0};
    }
    return lowrank_factors(w, r);
}

// Step counts per layer under the budget sum_l steps[l] * p_l <= budget, all in
// units of step * parameters.
struct StepSearch {
    std::span<const std::vector<double>> profiles;
    std::vector<double> params;
    double budget = 0.0;
    double slack = 0.0;
    std::size_t cap = 0;

    double used(const std::vector<std::size_t>& steps) const {
        double u = 0.0;
        for (std::size_t l = 0; l < steps.size(); ++l) {
            u += static_cast<double>(steps[l]) * params[l];
        }
        return u;
    }

    double objective(const std::vector<std::size_t>& steps) const {
        double total = 0.0;
        for (std::size_t l = 0; l < steps.size(); ++l) {
            total += profiles[l][steps[l]];
        }
        return total;
    }

    // Marginal-cost greedy: raise the layer with the least added deviation per
    // unit of budget that still fits.
    void fill(std::vector<std::size_t>& steps) const {
        const std::size_t L = steps.size();
        double u = used(steps);
        while (true) {
            std::size_t best = L;
            double best_cost = std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < L; ++l) {
                if (steps[l] >= cap || u + params[l] > budget + slack) {
                    continue;
                }
                const double cost = (profiles[l][steps[l] + 1] - profiles[l][steps[l]]) / params[l];
                if (cost < best_cost) {
                    best_cost = cost;
                    best = l;
                }
            }
            if (best == L) {
                return;
            }
            ++steps[best];
            u += params[best];
        }
    }

    // Exchange refinement: move one step from layer i to layer j (or add one
    // to j alone) while that strictly lowers the total. Moves never release
    // budget, so the refined plan is at least as sparse as its start.
    void refine(std::vector<std::size_t>& steps) const {
        const std::size_t L = steps.size();
        double u = used(steps);
        const double floor = u;
        while (true) {
            double best_gain = -1e-15;
            std::size_t bi = L;
            std::size_t bj = L;
            for (std::size_t j = 0; j < L; ++j) {
                if (steps[j] >= cap) {
                    continue;
                }
                const double up = profiles[j][steps[j] + 1] - profiles[j][steps[j]];
                for (std::size_t i = 0; i <= L; ++i) {
                    if (i == j || (i < L && steps[i] == 0)) {
                        continue;
                    }
                    const double after = u + params[j] - (i < L ? params[i] : 0.0);
                    if (after > budget + slack || after < floor - slack) {
                        continue;
                    }
                    const double gain = up + (i < L ? profiles[i][steps[i] - 1] - profiles[i][steps[i]] : 0.0);
                    if (gain < best_gain) {
                        best_gain = gain;
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (bj == L) {
                return;
            }
            if (bi < L) {
                --steps[bi];
                u -= params[bi];
            }
            ++steps[bj];
            u += params[bj];
        }
    }
};

} // namespace

std::vector<double> layer_error_profile(const Matrix& w, std::span<const Vector> calib_inputs,
                                        std::span<const double> sparsity_grid, GateMethod method,
                                        std::size_t rsparse_rank) {
    if (calib_inputs.empty()) {
        throw InvalidInput("layer_error_profile: empty calibration set");
    }
    for (std::size_t i = 0; i < sparsity_grid.size(); ++i) {
        if (!(sparsity_grid[i] >= 0.0 && sparsity_grid[i] < 1.0)) {
            throw InvalidInput("layer_error_profile: grid value " + std::to_string(sparsity_grid[i]) +
                               " outside [0, 1)");
        }
        if (i > 0 && sparsity_grid[i] < sparsity_grid[i - 1]) {
            throw InvalidInput("layer_error_profile: grid must be sorted ascending");
        }
    }
    for (const auto& x : calib_inputs) {
        if (x.size() != w.cols()) {
            throw InvalidInput("layer_error_profile: calibration input of length " + std::to_string(x.size()) +
                               " for a matrix with " + std::to_string(w.cols()) + " columns");
        }
    }
    const Vector c = column_norms(w);
    std::optional<LowRankFactors> lr;
    if (method == GateMethod::rsparse) {
        lr = factors_for(w, rsparse_rank);
    }
    std::vector<double> out;
    out.reserve(sparsity_grid.size());
    for (double s : sparsity_grid) {
        double acc = 0.0;
        for (const auto& x : calib_inputs) {
            acc += profile_point(w, x, s, method, c, lr ? &*lr : nullptr);
        }
        out.push_back(acc / static_cast<double>(calib_inputs.size()));
    }
    return out;
}

std::vector<double> step_grid(double step, double max_sparsity) {
    if (!(step > 0.0 && step < 1.0)) {
        throw InvalidInput("allocator: step must lie in (0, 1)");
    }
    if (!(max_sparsity >= 0.0 && max_sparsity < 1.0)) {
        throw InvalidInput("allocator: max_sparsity must lie in [0, 1)");
    }
    std::vector<double> grid;
    for (std::size_t i = 0; i <= max_steps(step, max_sparsity); ++i) {
        grid.push_back(static_cast<double>(i) * step);
    }
    return grid;
}

AllocationPlan greedy_allocate_profiles(std::span<const std::vector<double>> profiles,
                                        std::span<const std::size_t> parameters, double target, double step,
                                        double max_sparsity) {
    if (!(target >= 0.0 && target < 1.0)) {
        throw InvalidInput("allocator: target " + std::to_string(target) + " outside [0, 1)");
    }
    if (!(step > 0.0) || (target > 0.0 && step > target + 1e-12)) {
        throw InvalidInput("allocator: step must satisfy 0 < step <= target");
    }
    if (profiles.size() != parameters.size() || profiles.empty()) {
        throw InvalidInput("allocator: need one profile and one parameter count per layer");
    }
    const std::size_t cap = max_steps(step, max_sparsity);
    if (target > static_cast<double>(cap) * step + 1e-12) {
        throw InvalidInput("allocator: target " + std::to_string(target) + " unreachable with max per-layer sparsity " +
                           std::to_string(max_sparsity) + " and step " + std::to_string(step));
    }
    for (const auto& p : profiles) {
        if (p.size() < cap + 1) {
            throw InvalidInput("allocator: profile has " + std::to_string(p.size()) + " points, need " +
                               std::to_string(cap + 1));
        }
    }
    const std::size_t L = profiles.size();
    StepSearch search{profiles, {}, 0.0, 0.0, cap};
    for (std::size_t p : parameters) {
        search.params.push_back(static_cast<double>(p));
    }
    const double total = std::accumulate(search.params.begin(), search.params.end(), 0.0);
    if (!(total > 0.0)) {
        throw InvalidInput("allocator: parameter counts must not all be zero");
    }
    for (double p : search.params) {
        if (!(p > 0.0)) {
            throw InvalidInput("allocator: every layer needs a positive parameter count");
        }
    }
    search.budget = target / step * total;
    search.slack = 1e-9 * total;

    std::vector<std::size_t> steps(L, 0);
    search.fill(steps);
    search.refine(steps);
    // The uniform plan is a valid starting point whenever the target is on the step grid.
    const double uniform_steps = std::round(target / step);
    if (std::abs(uniform_steps - target / step) < 1e-9 && uniform_steps <= static_cast<double>(cap)) {
        std::vector<std::size_t> from_uniform(L, static_cast<std::size_t>(uniform_steps));
        search.refine(from_uniform);
        if (search.objective(from_uniform) < search.objective(steps) - 1e-12) {
            steps = std::move(from_uniform);
        }
    }
    AllocationPlan plan;
    plan.step = step;
    plan.target = target;
    plan.parameters.assign(parameters.begin(), parameters.end());
    for (std::size_t s : steps) {
        plan.per_layer_sparsity.push_back(static_cast<double>(s) * step);
    }
    plan.global_achieved = weighted_mean(plan.per_layer_sparsity, parameters);
    return plan;
}

AllocationPlan greedy_allocate(const LinearChain& chain, std::span<const Vector> calib_inputs, double target,
                               double step, GateMethod method, double max_sparsity, std::size_t rsparse_rank) {
    if (calib_inputs.empty()) {
        throw InvalidInput("greedy_allocate: empty calibration set");
    }
    if (target == 0.0) {
        AllocationPlan plan;
        plan.per_layer_sparsity.assign(chain.depth(), 0.0);
        plan.step = step;
        plan.method = method;
        for (const auto& w : chain.layers()) {
            plan.parameters.push_back(w.rows() * w.cols());
        }
        return plan;
    }
    const std::vector<double> grid = step_grid(step, max_sparsity);
    std::vector<std::vector<Vector>> per_layer(chain.depth());
    for (const auto& x : calib_inputs) {
        auto inputs = chain.layer_inputs(x);
        for (std::size_t l = 0; l < chain.depth(); ++l) {
            per_layer[l].push_back(std::move(inputs[l]));
        }
    }
    std::vector<std::vector<double>> profiles;
    std::vector<std::size_t> params;
    for (std::size_t l = 0; l < chain.depth(); ++l) {
        profiles.push_back(layer_error_profile(chain.layer(l), per_layer[l], grid, method, rsparse_rank));
        params.push_back(chain.layer(l).rows() * chain.layer(l).cols());
    }
    AllocationPlan plan = greedy_allocate_profiles(profiles, params, target, step, max_sparsity);
    plan.method = method;
    return plan;
}

AllocationPlan allocate_block(const ToyDecoderBlock& block, const TokenBatch& calib, double target, double step,
                              GateMethod method, double max_sparsity) {
    BlockTrace trace;
    block_forward(block, calib, nullptr, &trace);
    const auto params = slot_parameters(block);
    AllocationPlan plan;
    if (target == 0.0) {
        plan.per_layer_sparsity.assign(kBlockSlots.size(), 0.0);
        plan.step = step;
    } else {
        const std::vector<double> grid = step_grid(step, max_sparsity);
        std::vector<std::vector<double>> profiles;
        for (BlockSlot s : kBlockSlots) {
            profiles.push_back(
                layer_error_profile(block.slot(s), trace.slot_inputs[static_cast<std::size_t>(s)], grid, method));
        }
        plan = greedy_allocate_profiles(profiles, params, target, step, max_sparsity);
    }
    plan.method = method;
    plan.parameters.assign(params.begin(), params.end());
    return plan;
}

double plan_total_deviation(const LinearChain& chain, std::span<const Vector> calib_inputs,
                            std::span<const double> per_layer_sparsity, GateMethod method, std::size_t rsparse_rank) {
    if (per_layer_sparsity.size() != chain.depth()) {
        throw InvalidInput("plan_total_deviation: plan has " + std::to_string(per_layer_sparsity.size()) +
                           " entries for " + std::to_string(chain.depth()) + " layers");
    }
    if (calib_inputs.empty()) {
        throw InvalidInput("plan_total_deviation: empty calibration set");
    }
    std::vector<std::vector<Vector>> per_layer(chain.depth());
    for (const auto& x : calib_inputs) {
        auto inputs = chain.layer_inputs(x);
        for (std::size_t l = 0; l < chain.depth(); ++l) {
            per_layer[l].push_back(std::move(inputs[l]));
        }
    }
    double total = 0.0;
    for (std::size_t l = 0; l < chain.depth(); ++l) {
        const double s = per_layer_sparsity[l];
        total += layer_error_profile(chain.layer(l), per_layer[l], std::span<const double>(&s, 1), method,
                                     rsparse_rank)
                     .front();
    }
    return total;
}

std::string to_json(const AllocationPlan& plan) {
    nlohmann::json doc = {{"format_version", 1},
                          {"schema", "wina.allocation_plan"},
                          {"method", std::string(to_string(plan.method))},
                          {"target", plan.target},
                          {"step", plan.step},
                          {"global_achieved", plan.global_achieved},
                          {"per_layer_sparsity", plan.per_layer_sparsity},
                          {"parameters", plan.parameters}};
    return doc.dump(2) + "\n";
}

AllocationPlan allocation_plan_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("allocation plan: ") + e.what());
    }
    try {
        if (doc.at("format_version").get<int>() != 1) {
            throw InvalidInput("allocation plan /format_version: unsupported version");
        }
        AllocationPlan plan;
        plan.method = parse_gate_method(doc.at("method").get<std::string>());
        plan.target = doc.at("target").get<double>();
        plan.step = doc.at("step").get<double>();
        plan.per_layer_sparsity = doc.at("per_layer_sparsity").get<std::vector<double>>();
        plan.parameters = doc.value("parameters", std::vector<std::size_t>{});
        for (double s : plan.per_layer_sparsity) {
            if (!(s >= 0.0 && s < 1.0)) {
                throw InvalidInput("allocation plan /per_layer_sparsity: value outside [0, 1)");
            }
        }
        if (plan.parameters.size() == plan.per_layer_sparsity.size()) {
            plan.global_achieved = weighted_mean(plan.per_layer_sparsity, plan.parameters);
        } else if (plan.parameters.empty()) {
            plan.global_achieved = doc.value("global_achieved", 0.0);
        } else {
            throw InvalidInput("allocation plan /parameters: length does not match per_layer_sparsity");
        }
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("allocation plan: ") + e.what());
    }
}

} // namespace wina
