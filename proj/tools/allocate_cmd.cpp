// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <iomanip>
#include <iostream>
#include <memory>

#include "common.hpp"
#include "wina/allocator.hpp"
#include "wina/netfile.hpp"
#include "wina/random.hpp"
#include "wina/version.hpp"

namespace wina::cli {

namespace {

constexpr std::uint64_t kCalibTag = 0x43414C4942ULL; // "CALIB"

struct AllocateFlags {
    std::string net;
    std::string dims = "256,256,256,256";
    std::size_t calib = 32;
    double target = 0.5;
    double step = kDefaultAllocStep;
    double max_sparsity = kDefaultMaxSparsity;
    std::string method = "wina";
    std::uint64_t seed = 0;
    std::string out;
};

int run(const AllocateFlags& f, const CLI::App& sub) {
    const std::uint64_t seed = sub.count("--seed") > 0 ? f.seed : default_seed();
    if (f.calib == 0) {
        throw UsageError("--calib must be >= 1");
    }
    const GateMethod method = parse_gate_method(f.method);
    NetFile net;
    if (!f.net.empty()) {
        net = load_netfile(f.net);
    } else {
        const auto dims = parse_sizes(f.dims, "--dims");
        if (dims.size() < 2) {
            throw UsageError("--dims needs at least two sizes");
        }
        net.chain = random_chain(dims, Activation::linear, seed);
    }

    AllocationPlan plan;
    std::vector<std::string> names;
    double greedy_total = 0.0;
    double uniform_total = 0.0;
    bool have_totals = false;
    if (net.kind == NetKind::chain) {
        std::vector<Vector> calib;
        for (std::size_t i = 0; i < f.calib; ++i) {
            Vector x = gaussian_vector(net.chain.input_dim(), derive_seed(seed, {kCalibTag, i}));
            calib.push_back(net.input_rotation ? matvec(transpose(*net.input_rotation), x) : x);
        }
        plan = greedy_allocate(net.chain, calib, f.target, f.step, method, f.max_sparsity);
        for (std::size_t l = 0; l < net.chain.depth(); ++l) {
            names.push_back("layer" + std::to_string(l + 1));
        }
        greedy_total = plan_total_deviation(net.chain, calib, plan.per_layer_sparsity, method);
        const std::vector<double> uniform(net.chain.depth(), f.target);
        uniform_total = plan_total_deviation(net.chain, calib, uniform, method);
        have_totals = true;
    } else {
        TokenBatch batch{Matrix(f.calib, net.block.d)};
        Rng rng(derive_seed(seed, {kCalibTag}));
        for (std::size_t t = 0; t < f.calib; ++t) {
            const auto row = net.block.w_emb.row(rng.below(net.block.vocab()));
            std::copy(row.begin(), row.end(), batch.x.row(t).begin());
        }
        plan = allocate_block(net.block, batch, f.target, f.step, method, f.max_sparsity);
        for (BlockSlot s : kBlockSlots) {
            names.emplace_back(to_string(s));
        }
    }

    const std::string out = f.out.empty() ? "allocation_plan_seed" + std::to_string(seed) + ".json" : f.out;
    write_text(out, to_json(plan));

    std::cout << "# wina " << kVersion << " allocate  seed=" << seed << "  method=" << to_string(method)
              << "  target=" << f.target << "  step=" << f.step << "  calib=" << f.calib << '\n';
    std::cout << std::left << std::setw(10) << "layer" << std::right << std::setw(14) << "parameters"
              << std::setw(12) << "sparsity" << '\n';
    for (std::size_t l = 0; l < names.size(); ++l) {
        std::cout << std::left << std::setw(10) << names[l] << std::right << std::setw(14) << plan.parameters[l]
                  << std::fixed << std::setprecision(3) << std::setw(12) << plan.per_layer_sparsity[l] << '\n';
    }
    std::cout << "global (parameter-weighted) sparsity: " << std::setprecision(4) << plan.global_achieved << '\n';
    if (have_totals) {
        std::cout << "total calibration deviation: greedy " << std::setprecision(6) << greedy_total << "  uniform "
                  << uniform_total << '\n';
    }
    std::cout << "wrote " << out << '\n';
    return kExitOk;
}

} // namespace

void register_allocate(CLI::App& app, int& exit_code) {
    auto flags = std::make_shared<AllocateFlags>();
    CLI::App* sub = app.add_subcommand("allocate", "Greedy per-layer sparsity allocation under a global budget");
    sub->add_option("--net", flags->net, "Network file (chain or block); default a random chain from --dims");
    sub->add_option("--dims", flags->dims, "Random chain layer sizes when --net is absent")->capture_default_str();
    sub->add_option("--calib", flags->calib, "Calibration inputs (vectors or tokens)")->capture_default_str();
    sub->add_option("--target", flags->target, "Global parameter-weighted sparsity")->capture_default_str();
    sub->add_option("--step", flags->step, "Sparsity increment")->capture_default_str();
    sub->add_option("--max-sparsity", flags->max_sparsity, "Per-layer cap")->capture_default_str();
    sub->add_option("--method", flags->method, "teal, wina or rsparse")->capture_default_str();
    sub->add_option("--seed", flags->seed, "Seed for the chain and calibration data (default $WINA_SEED or 0)");
    sub->add_option("--out", flags->out, "Plan JSON (default allocation_plan_seed<seed>.json)");
    sub->callback([flags, sub, &exit_code] { exit_code = guarded("allocate", [&] { return run(*flags, *sub); }); });
}

} // namespace wina::cli
