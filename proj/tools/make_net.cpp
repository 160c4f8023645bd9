// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <memory>

#include "common.hpp"
#include "wina/netfile.hpp"
#include "wina/version.hpp"

namespace wina::cli {

namespace {

struct MakeNetFlags {
    std::string kind = "chain";
    std::string dims = "64,64,64,64";
    std::string activation = "linear";
    std::size_t d = 32;
    std::size_t m = 64;
    std::size_t heads = 4;
    std::size_t vocab = 50;
    std::uint64_t seed = 0;
    std::string out;
};

int run(const MakeNetFlags& f, const CLI::App& sub) {
    const std::uint64_t seed = sub.count("--seed") > 0 ? f.seed : default_seed();
    NetFile net;
    std::string default_name;
    if (f.kind == "chain") {
        net.kind = NetKind::chain;
        const auto dims = parse_sizes(f.dims, "--dims");
        if (dims.size() < 2) {
            throw UsageError("--dims needs at least two sizes");
        }
        net.chain = random_chain(dims, parse_activation(f.activation), seed);
        default_name = "chain_seed" + std::to_string(seed) + ".json";
    } else if (f.kind == "block") {
        net.kind = NetKind::block;
        net.block = random_block(f.d, f.m, f.heads, f.vocab, seed);
        default_name = "block_seed" + std::to_string(seed) + ".json";
    } else {
        throw UsageError("--kind must be chain or block");
    }
    const std::string out = f.out.empty() ? default_name : f.out;
    save_netfile(net, out);
    std::cout << "# wina " << kVersion << " make-net  kind=" << f.kind << "  seed=" << seed << '\n';
    std::cout << "wrote " << out << '\n';
    return kExitOk;
}

} // namespace

void register_make_net(CLI::App& app, int& exit_code) {
    auto flags = std::make_shared<MakeNetFlags>();
    CLI::App* sub = app.add_subcommand("make-net", "Write a random Kaiming-initialized chain or toy block");
    sub->add_option("--kind", flags->kind, "chain or block")->capture_default_str();
    sub->add_option("--dims", flags->dims, "Chain layer sizes n0,...,nL")->capture_default_str();
    sub->add_option("--activation", flags->activation, "Chain activation: linear or silu")->capture_default_str();
    sub->add_option("--d", flags->d, "Block hidden size")->capture_default_str();
    sub->add_option("--m", flags->m, "Block MLP width")->capture_default_str();
    sub->add_option("--heads", flags->heads, "Block attention heads")->capture_default_str();
    sub->add_option("--vocab", flags->vocab, "Block vocabulary size")->capture_default_str();
    sub->add_option("--seed", flags->seed, "Seed (default $WINA_SEED or 0)");
    sub->add_option("--out", flags->out, "Output path (default <kind>_seed<seed>.json)");
    sub->callback([flags, sub, &exit_code] { exit_code = guarded("make-net", [&] { return run(*flags, *sub); }); });
}

} // namespace wina::cli
