// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <memory>

#include "common.hpp"
#include "wina/cost_model.hpp"
#include "wina/version.hpp"

namespace wina::cli {

namespace {

struct CostFlags {
    std::size_t d = 4096;
    std::size_t m = 11008;
    double a = 0.5;
    std::size_t r = 64;
    std::string plan;
    std::string out;
};

int run(const CostFlags& f) {
    const BlockShape shape{f.d, f.m};
    shape.validate();
    const auto reports = cost_summary(f.a, f.r, shape);
    std::optional<double> savings;
    if (!f.plan.empty()) {
        savings = flops_savings(shape, allocation_plan_from_json(read_text(f.plan)));
    }
    const std::string out =
        f.out.empty() ? "cost_d" + std::to_string(f.d) + "_m" + std::to_string(f.m) + ".json" : f.out;
    write_text(out, to_json(reports, shape));
    write_text(replace_extension(out, ".csv"), to_csv(reports));
    std::cout << "# wina " << kVersion << " cost  d=" << f.d << "  m=" << f.m << "  a=" << f.a << "  r=" << f.r
              << '\n';
    std::cout << format_table(reports, shape);
    if (savings) {
        std::cout << "GEMV FLOP savings of plan " << f.plan << ": " << *savings << '\n';
    }
    std::cout << "wrote " << out << " and " << replace_extension(out, ".csv") << '\n';
    return kExitOk;
}

} // namespace

void register_cost(CLI::App& app, int& exit_code) {
    auto flags = std::make_shared<CostFlags>();
    CLI::App* sub = app.add_subcommand("cost", "Ops / memory / parameter factors of a decoder block");
    sub->add_option("--d", flags->d, "Hidden size")->capture_default_str();
    sub->add_option("--m", flags->m, "MLP width")->capture_default_str();
    sub->add_option("--a", flags->a, "Active ratio (1 - sparsity)")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    sub->add_option("--r", flags->r, "R-Sparse rank")->capture_default_str();
    sub->add_option("--plan", flags->plan, "Allocation plan over the seven block GEMVs; prints its FLOP savings");
    sub->add_option("--out", flags->out, "Report JSON (default cost_d<d>_m<m>.json); the CSV goes next to it");
    sub->callback([flags, &exit_code] { exit_code = guarded("cost", [&] { return run(*flags); }); });
}

} // namespace wina::cli
