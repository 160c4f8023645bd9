// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "common.hpp"
#include "wina/error_bench.hpp"
#include "wina/ortho.hpp"
#include "wina/random.hpp"
#include "wina/svd.hpp"
#include "wina/version.hpp"

namespace wina::cli {

namespace {

struct VerifyFlags {
    bool quick = false;
    std::uint64_t seed = 0;
};

struct CheckResult {
    std::string name;
    std::size_t instances = 0;
    double worst = 0.0;
    double tolerance = 0.0;
    std::string failure; // empty when passed
};

Matrix column_orthogonal(std::size_t m, std::size_t n, std::uint64_t seed) {
    const Matrix w = kaiming_init(m, n, seed);
    return matmul(w, right_orthogonal_factor(w));
}

std::string describe(std::uint64_t seed, const std::string& rest) {
    std::ostringstream s;
    s << "seed=" << seed << ' ' << rest;
    return s.str();
}

CheckResult check_optimality(std::uint64_t base, std::size_t count, std::size_t max_n) {
    CheckResult r{"wina optimal on column-orthogonal W", 0, 0.0, 1e-10, {}};
    for (std::size_t i = 0; i < count && r.failure.empty(); ++i) {
        const std::uint64_t seed = derive_seed(base, {1, i});
        Rng rng(seed);
        const std::size_t n = 2 + rng.below(max_n - 1);
        const std::size_t m = 2 + rng.below(max_n - 1);
        const Matrix w = column_orthogonal(m, n, derive_seed(seed, {1}));
        const Vector x = gaussian_vector(n, derive_seed(seed, {2}));
        const Vector c = column_norms(w);
        for (std::size_t k = 0; k <= n; ++k) {
            const double wina = gated_deviation(w, x, gate_wina(x, c, k));
            const double best = brute_force_optimal_gate(w, x, k).deviation;
            const double gap = wina - best;
            r.worst = std::max(r.worst, gap);
            ++r.instances;
            if (gap > r.tolerance) {
                r.failure = describe(seed, "n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                               " k=" + std::to_string(k));
                break;
            }
        }
    }
    return r;
}

CheckResult check_cross_term(std::uint64_t base, std::size_t count) {
    CheckResult r{"cross-term identity", 0, 0.0, 1e-8, {}};
    for (std::size_t i = 0; i < count && r.failure.empty(); ++i) {
        const std::uint64_t seed = derive_seed(base, {2, i});
        Rng rng(seed);
        const std::size_t n = 2 + rng.below(15);
        const std::size_t m = n + rng.below(8);
        const Matrix w = column_orthogonal(m, n, derive_seed(seed, {1}));
        const Vector x = gaussian_vector(n, derive_seed(seed, {2}));
        const Vector c = column_norms(w);
        const std::size_t k = rng.below(n + 1);
        const GateMask g = gate_magnitude(gaussian_vector(n, derive_seed(seed, {3})), k);
        const double dev = gated_deviation(w, x, g);
        double separable = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!g.keeps(j)) {
                separable += x[j] * x[j] * c[j] * c[j];
            }
        }
        const double rel = std::abs(dev * dev - separable) / std::max(separable, 1e-12);
        r.worst = std::max(r.worst, rel);
        ++r.instances;
        if (rel > r.tolerance) {
            r.failure = describe(seed, "n=" + std::to_string(n) + " m=" + std::to_string(m) + " k=" +
                                           std::to_string(k));
        }
    }
    return r;
}

CheckResult check_bound(std::uint64_t base, std::size_t count) {
    CheckResult r{"deviation <= Young bound", 0, 0.0, 1e-9, {}};
    for (std::size_t i = 0; i < count && r.failure.empty(); ++i) {
        const std::uint64_t seed = derive_seed(base, {3, i});
        Rng rng(seed);
        const std::size_t depth = 1 + rng.below(4);
        std::vector<std::size_t> dims;
        for (std::size_t l = 0; l <= depth; ++l) {
            dims.push_back(2 + rng.below(9));
        }
        const LinearChain chain =
            orthogonalize_chain(random_chain(dims, Activation::linear, derive_seed(seed, {1})), false).chain;
        const Vector x = gaussian_vector(dims.front(), derive_seed(seed, {2}));
        std::vector<std::size_t> ks;
        for (std::size_t l = 0; l < depth; ++l) {
            ks.push_back(rng.below(dims[l] + 1));
        }
        const GateMethod method = rng.below(2) == 0 ? GateMethod::wina : GateMethod::teal;
        const auto gates = sequential_gates(chain, x, method, ks);
        const double e = deviation_E(chain, gates, x);
        for (double alpha : {0.5, 1.0, 2.0}) {
            const double u = upper_bound_U(chain, gates, x, alpha);
            const double excess = e - u;
            r.worst = std::max(r.worst, excess);
            ++r.instances;
            if (excess > r.tolerance) {
                std::ostringstream s;
                s << "depth=" << depth << " alpha=" << alpha << " method=" << to_string(method);
                r.failure = describe(seed, s.str());
                break;
            }
        }
    }
    return r;
}

CheckResult check_chain_invariance(std::uint64_t base, std::size_t count) {
    CheckResult r{"chain orthogonalization", 0, 0.0, 1e-6, {}};
    for (std::size_t i = 0; i < count && r.failure.empty(); ++i) {
        const std::uint64_t seed = derive_seed(base, {4, i});
        Rng rng(seed);
        std::vector<std::size_t> dims;
        for (int l = 0; l < 4; ++l) {
            dims.push_back(4 + rng.below(29));
        }
        const LinearChain chain = random_chain(dims, Activation::linear, derive_seed(seed, {1}));
        const OrthoResult res = orthogonalize_chain(chain, false);
        double gram = 0.0;
        for (std::size_t l = 1; l < res.chain.depth(); ++l) {
            gram = std::max(gram, verify_column_orthogonality(res.chain.layer(l)));
        }
        const std::function<Vector(const Vector&)> f = [&](const Vector& x) { return chain.forward(x); };
        const std::function<Vector(const Vector&)> g = [&](const Vector& x) { return res.chain.forward(x); };
        const double inv = verify_invariance(f, g, dims.front(), 20, derive_seed(seed, {2}));
        r.worst = std::max(r.worst, inv);
        ++r.instances;
        if (inv > r.tolerance || gram > 1e-8) {
            std::ostringstream s;
            s << "dims=" << dims[0] << "," << dims[1] << "," << dims[2] << "," << dims[3] << " gram=" << gram;
            r.failure = describe(seed, s.str());
        }
    }
    return r;
}

CheckResult check_block_invariance(std::uint64_t base, std::size_t count, std::size_t d, std::size_t m,
                                   std::size_t heads) {
    CheckResult r{"block orthogonalization", 0, 0.0, 1e-5, {}};
    for (std::size_t i = 0; i < count && r.failure.empty(); ++i) {
        const std::uint64_t seed = derive_seed(base, {5, i});
        const std::size_t vocab = 40;
        const ToyDecoderBlock block = random_block(d, m, heads, vocab, derive_seed(seed, {1}));
        const ToyDecoderBlock rotated = orthogonalize_block(block);
        double gram = 0.0;
        for (BlockSlot s : kOrthoTargets) {
            gram = std::max(gram, verify_column_orthogonality(rotated.slot(s)));
        }
        using Tokens = std::vector<std::size_t>;
        const std::function<Vector(const Tokens&)> f = [&](const Tokens& t) {
            return Vector(model_forward(block, t).data());
        };
        const std::function<Vector(const Tokens&)> g = [&](const Tokens& t) {
            return Vector(model_forward(rotated, t).data());
        };
        const double inv = verify_invariance<Tokens>(
            f, g,
            [vocab](Rng& rng) {
                Tokens t(6);
                for (auto& id : t) {
                    id = rng.below(vocab);
                }
                return t;
            },
            20, derive_seed(seed, {2}));
        r.worst = std::max(r.worst, inv);
        ++r.instances;
        if (inv > r.tolerance || gram > 1e-8) {
            std::ostringstream s;
            s << "d=" << d << " m=" << m << " heads=" << heads << " gram=" << gram;
            r.failure = describe(seed, s.str());
        }
    }
    return r;
}

CheckResult check_witness(std::uint64_t base) {
    CheckResult r{"orthogonality is necessary (witness)", 0, 0.0, 0.0, {}};
    const auto w = find_necessity_witness(6, 6, 3, base, 200);
    r.instances = 1;
    if (!w) {
        r.failure = describe(base, "no witness among 200 seeds");
    } else {
        r.worst = w->wina_deviation - w->optimal_deviation;
    }
    return r;
}

int run(const VerifyFlags& f, const CLI::App& sub) {
    const std::uint64_t seed = sub.count("--seed") > 0 ? f.seed : default_seed();
    std::vector<CheckResult> results;
    if (f.quick) {
        results.push_back(check_optimality(seed, 20, 8));
        results.push_back(check_cross_term(seed, 50));
        results.push_back(check_bound(seed, 50));
        results.push_back(check_chain_invariance(seed, 5));
        results.push_back(check_block_invariance(seed, 1, 16, 32, 2));
    } else {
        results.push_back(check_optimality(seed, 100, 12));
        results.push_back(check_cross_term(seed, 200));
        results.push_back(check_bound(seed, 200));
        results.push_back(check_chain_invariance(seed, 20));
        results.push_back(check_block_invariance(seed, 3, 32, 64, 4));
    }
    results.push_back(check_witness(seed));

    std::cout << "# wina " << kVersion << " verify  seed=" << seed << "  mode=" << (f.quick ? "quick" : "full")
              << '\n';
    bool ok = true;
    for (const auto& r : results) {
        const bool pass = r.failure.empty();
        ok = ok && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << std::left << std::setw(40) << r.name << std::right
                  << " instances=" << std::setw(5) << r.instances << "  worst=" << std::scientific
                  << std::setprecision(3) << r.worst << '\n';
        if (!pass) {
            std::cout << "     failing instance: " << r.failure << '\n';
        }
    }
    std::cout << (ok ? "all checks passed" : "verification FAILED") << '\n';
    return ok ? kExitOk : kExitVerifyFailed;
}

} // namespace

void register_verify(CLI::App& app, int& exit_code) {
    auto flags = std::make_shared<VerifyFlags>();
    CLI::App* sub = app.add_subcommand("verify", "Run the oracle suite; exit 1 on any failure");
    sub->add_flag("--quick", flags->quick, "Smaller instance counts");
    sub->add_option("--seed", flags->seed, "Base seed (default $WINA_SEED or 0)");
    sub->callback([flags, sub, &exit_code] { exit_code = guarded("verify", [&] { return run(*flags, *sub); }); });
}

} // namespace wina::cli
