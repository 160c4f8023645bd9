// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "common.hpp"
#include "json.hpp"
#include "wina/netfile.hpp"
#include "wina/ortho.hpp"
#include "wina/random.hpp"
#include "wina/version.hpp"

namespace wina::cli {

namespace {

constexpr double kGramTol = 1e-8;
constexpr double kChainInvarianceTol = 1e-6;
constexpr double kBlockInvarianceTol = 1e-5;
constexpr std::size_t kInvarianceInputs = 20;
constexpr std::size_t kBlockTokens = 8;

struct OrthoFlags {
    std::string in;
    std::string out;
    std::string report;
    bool rotate_input = false;
    std::uint64_t seed = 0;
};

double relative_gram(const Matrix& w) {
    return verify_column_orthogonality(w) / std::max(1.0, gram_diag_max(w));
}

Vector apply_rotation(const std::optional<Matrix>& r, const Vector& x) {
    return r ? matvec(transpose(*r), x) : x;
}

Vector flatten(const Matrix& m) {
    return Vector(m.data());
}

int run(const OrthoFlags& f, const CLI::App& sub) {
    const std::uint64_t seed = sub.count("--seed") > 0 ? f.seed : default_seed();
    const auto start = std::chrono::steady_clock::now();
    const NetFile net = load_netfile(f.in);
    NetFile transformed = net;
    nlohmann::json matrices = nlohmann::json::array();
    double invariance = 0.0;
    double tolerance = 0.0;
    bool gram_ok = true;

    if (net.kind == NetKind::chain) {
        const OrthoResult res = orthogonalize_chain(net.chain, f.rotate_input);
        transformed.chain = res.chain;
        if (res.input_rotation) {
            transformed.input_rotation = net.input_rotation ? matmul(*net.input_rotation, *res.input_rotation)
                                                            : *res.input_rotation;
        }
        for (std::size_t l = 0; l < net.chain.depth(); ++l) {
            const bool targeted = l > 0 || f.rotate_input;
            const double after = relative_gram(res.chain.layer(l));
            gram_ok = gram_ok && (!targeted || after <= kGramTol);
            matrices.push_back({{"name", "layer" + std::to_string(l + 1)},
                                {"rows", net.chain.layer(l).rows()},
                                {"cols", net.chain.layer(l).cols()},
                                {"gram_offdiag_before", relative_gram(net.chain.layer(l))},
                                {"gram_offdiag_after", after},
                                {"targeted", targeted}});
        }
        const std::function<Vector(const Vector&)> before = [&](const Vector& x) {
            return net.chain.forward(apply_rotation(net.input_rotation, x));
        };
        const std::function<Vector(const Vector&)> after = [&](const Vector& x) {
            return transformed.chain.forward(apply_rotation(transformed.input_rotation, x));
        };
        invariance = verify_invariance(before, after, net.chain.input_dim(), kInvarianceInputs, seed);
        tolerance = kChainInvarianceTol;
    } else {
        transformed.block = orthogonalize_block(net.block);
        for (BlockSlot s : kBlockSlots) {
            const bool targeted = std::find(kOrthoTargets.begin(), kOrthoTargets.end(), s) != kOrthoTargets.end();
            const double after = relative_gram(transformed.block.slot(s));
            gram_ok = gram_ok && (!targeted || after <= kGramTol);
            matrices.push_back({{"name", std::string(to_string(s))},
                                {"rows", net.block.slot(s).rows()},
                                {"cols", net.block.slot(s).cols()},
                                {"gram_offdiag_before", relative_gram(net.block.slot(s))},
                                {"gram_offdiag_after", after},
                                {"targeted", targeted}});
        }
        using Tokens = std::vector<std::size_t>;
        const std::size_t vocab = net.block.vocab();
        const std::function<Vector(const Tokens&)> before = [&](const Tokens& t) {
            return flatten(model_forward(net.block, t));
        };
        const std::function<Vector(const Tokens&)> after = [&](const Tokens& t) {
            return flatten(model_forward(transformed.block, t));
        };
        invariance = verify_invariance<Tokens>(
            before, after,
            [vocab](Rng& rng) {
                Tokens t(kBlockTokens);
                for (auto& id : t) {
                    id = rng.below(vocab);
                }
                return t;
            },
            kInvarianceInputs, seed);
        tolerance = kBlockInvarianceTol;
    }

    const std::string out = f.out.empty() ? replace_extension(f.in, ".ortho.json") : f.out;
    const std::string report_path = f.report.empty() ? replace_extension(out, ".report.json") : f.report;
    save_netfile(transformed, out);
    const bool passed = gram_ok && invariance <= tolerance;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const nlohmann::json report = {{"format_version", 1},
                                   {"schema", "wina.ortho_report"},
                                   {"toolkit_version", kVersion},
                                   {"kind", net.kind == NetKind::chain ? "chain" : "block"},
                                   {"seed", seed},
                                   {"rotate_input", f.rotate_input},
                                   {"gram_tolerance", kGramTol},
                                   {"matrices", matrices},
                                   {"invariance",
                                    {{"n_inputs", kInvarianceInputs},
                                     {"max_relative_deviation", invariance},
                                     {"tolerance", tolerance}}},
                                   {"passed", passed},
                                   {"wall_time_s", wall}};
    write_text(report_path, report.dump(2) + "\n");

    std::cout << "# wina " << kVersion << " ortho  in=" << f.in << "  seed=" << seed << '\n';
    std::cout << std::left << std::setw(10) << "matrix" << std::right << std::setw(12) << "shape" << std::setw(16)
              << "gram before" << std::setw(16) << "gram after" << std::setw(10) << "target" << '\n';
    for (const auto& m : matrices) {
        std::ostringstream shape;
        shape << m["rows"].get<std::size_t>() << "x" << m["cols"].get<std::size_t>();
        std::cout << std::left << std::setw(10) << m["name"].get<std::string>() << std::right << std::setw(12)
                  << shape.str() << std::scientific << std::setprecision(3) << std::setw(16)
                  << m["gram_offdiag_before"].get<double>() << std::setw(16) << m["gram_offdiag_after"].get<double>()
                  << std::setw(10) << (m["targeted"].get<bool>() ? "yes" : "no") << '\n';
    }
    std::cout << "invariance (max relative deviation over " << kInvarianceInputs << " inputs): " << invariance
              << "  tolerance " << tolerance << '\n';
    std::cout << (passed ? "PASS" : "FAIL") << "  wrote " << out << " and " << report_path << '\n';
    return passed ? kExitOk : kExitVerifyFailed;
}

} // namespace

void register_ortho(CLI::App& app, int& exit_code) {
    auto flags = std::make_shared<OrthoFlags>();
    CLI::App* sub = app.add_subcommand("ortho", "Orthogonalize a network file without changing its function");
    sub->add_option("--in", flags->in, "Input network file")->required();
    sub->add_option("--out", flags->out, "Transformed network file (default <in>.ortho.json)");
    sub->add_option("--report", flags->report, "Report JSON (default <out>.report.json)");
    sub->add_flag("--rotate-input", flags->rotate_input,
                  "Chains only: rotate the first layer too and store the input rotation");
    sub->add_option("--seed", flags->seed, "Seed for the invariance inputs (default $WINA_SEED or 0)");
    sub->callback([flags, sub, &exit_code] { exit_code = guarded("ortho", [&] { return run(*flags, *sub); }); });
}

} // namespace wina::cli
