// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "wina/cost_model.hpp"

#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "wina/errors.hpp"

namespace wina {

namespace {

void check_ratio(double a) {
    if (!(a >= 0.0 && a <= 1.0)) {
        throw InvalidInput("cost model: active ratio " + std::to_string(a) + " outside [0, 1]");
    }
}

double denom(const BlockShape& shape) {
    return static_cast<double>(dense_block_macs(shape));
}

} // namespace

void BlockShape::validate() const {
    if (d < 1 || m < 1) {
        throw InvalidInput("block shape: d and m must be >= 1");
    }
}

std::string_view to_string(CostMethod m) noexcept {
    switch (m) {
    case CostMethod::dense:
        return "dense";
    case CostMethod::teal:
        return "teal";
    case CostMethod::wina:
        return "wina";
    case CostMethod::rsparse:
        return "rsparse";
    }
    return "unknown";
}

CostMethod parse_cost_method(std::string_view name) {
    if (name == "dense") {
        return CostMethod::dense;
    }
    if (name == "teal" || name == "cats") {
        return CostMethod::teal;
    }
    if (name == "wina") {
        return CostMethod::wina;
    }
    if (name == "rsparse" || name == "r-sparse") {
        return CostMethod::rsparse;
    }
    throw InvalidInput("unknown cost method '" + std::string(name) + "' (expected dense, teal, wina or rsparse)");
}

MemBound parse_mem_bound(std::string_view name) {
    if (name == "lb") {
        return MemBound::lb;
    }
    if (name == "ub") {
        return MemBound::ub;
    }
    throw InvalidInput("unknown memory bound '" + std::string(name) + "' (expected lb or ub)");
}

std::vector<GemvShape> block_gemvs(const BlockShape& shape) {
    shape.validate();
    const std::size_t d = shape.d;
    const std::size_t m = shape.m;
    return {{d, d}, {d, d}, {d, d}, {d, d}, {d, m}, {d, m}, {m, d}};
}

std::uint64_t dense_block_macs(const BlockShape& shape) {
    shape.validate();
    const auto d = static_cast<std::uint64_t>(shape.d);
    const auto m = static_cast<std::uint64_t>(shape.m);
    return 4 * d * d + 3 * d * m;
}

double ops_factor(CostMethod method, double a, std::size_t r, const BlockShape& shape) {
    check_ratio(a);
    shape.validate();
    switch (method) {
    case CostMethod::dense:
        return 1.0;
    case CostMethod::teal:
    case CostMethod::wina:
        return a;
    case CostMethod::rsparse: {
        const double d = static_cast<double>(shape.d);
        const double m = static_cast<double>(shape.m);
        return a + static_cast<double>(r) * (11.0 * d - 6.0 * a * d + (3.0 - a) * m) / denom(shape);
    }
    }
    throw InvalidInput("ops_factor: unknown method");
}

double mem_factor(CostMethod method, double a, std::size_t r, const BlockShape& shape, MemBound bound) {
    check_ratio(a);
    shape.validate();
    switch (method) {
    case CostMethod::dense:
        return 1.0;
    case CostMethod::teal:
    case CostMethod::wina:
        return a;
    case CostMethod::rsparse:
        if (bound == MemBound::lb) {
            return ops_factor(method, a, r, shape);
        }
        return a + extra_params_factor(method, r, shape);
    }
    throw InvalidInput("mem_factor: unknown method");
}

double extra_params_factor(CostMethod method, std::size_t r, const BlockShape& shape) {
    shape.validate();
    if (method != CostMethod::rsparse) {
        return 0.0;
    }
    const double d = static_cast<double>(shape.d);
    const double m = static_cast<double>(shape.m);
    return static_cast<double>(r) * (11.0 * d + 3.0 * m) / denom(shape);
}

double gating_overhead_ratio(std::size_t d) {
    if (d < 1) {
        throw InvalidInput("gating_overhead_ratio: d must be >= 1");
    }
    return 1.0 / static_cast<double>(d);
}

double flops_savings(const BlockShape& shape, const AllocationPlan& plan) {
    const auto gemvs = block_gemvs(shape);
    if (plan.per_layer_sparsity.size() != gemvs.size()) {
        throw InvalidInput("flops_savings: plan has " + std::to_string(plan.per_layer_sparsity.size()) +
                           " entries, the block has " + std::to_string(gemvs.size()) + " GEMVs");
    }
    double active = 0.0;
    for (std::size_t i = 0; i < gemvs.size(); ++i) {
        const double s = plan.per_layer_sparsity[i];
        if (!(s >= 0.0 && s <= 1.0)) {
            throw InvalidInput("flops_savings: sparsity " + std::to_string(s) + " outside [0, 1]");
        }
        active += (1.0 - s) * static_cast<double>(gemvs[i].in_dim) * static_cast<double>(gemvs[i].out_dim);
    }
    return 1.0 - active / denom(shape);
}

CostReport cost_report(CostMethod method, double a, std::size_t r, const BlockShape& shape) {
    CostReport rep;
    rep.method = method;
    rep.active_ratio = a;
    rep.rank = method == CostMethod::rsparse ? r : 0;
    rep.ops_factor = ops_factor(method, a, rep.rank, shape);
    rep.mem_factor_lb = mem_factor(method, a, rep.rank, shape, MemBound::lb);
    rep.mem_factor_ub = mem_factor(method, a, rep.rank, shape, MemBound::ub);
    rep.extra_params_factor = extra_params_factor(method, rep.rank, shape);
    rep.dense_macs = dense_block_macs(shape);
    return rep;
}

std::vector<CostReport> cost_summary(double a, std::size_t r, const BlockShape& shape) {
    std::vector<CostReport> out;
    for (CostMethod m : {CostMethod::dense, CostMethod::teal, CostMethod::rsparse, CostMethod::wina}) {
        out.push_back(cost_report(m, m == CostMethod::dense ? 1.0 : a, r, shape));
    }
    return out;
}

std::string to_json(const std::vector<CostReport>& reports, const BlockShape& shape) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : reports) {
        rows.push_back({{"method", std::string(to_string(r.method))},
                        {"a", r.active_ratio},
                        {"r", r.rank},
                        {"ops_factor", r.ops_factor},
                        {"mem_factor_lb", r.mem_factor_lb},
                        {"mem_factor_ub", r.mem_factor_ub},
                        {"extra_params_factor", r.extra_params_factor},
                        {"dense_macs", r.dense_macs}});
    }
    nlohmann::json doc = {{"format_version", 1},
                          {"schema", "wina.cost_report"},
                          {"shape", {{"d", shape.d}, {"m", shape.m}}},
                          {"gating_overhead_ratio", gating_overhead_ratio(shape.d)},
                          {"reports", rows}};
    return doc.dump(2) + "\n";
}

std::string to_csv(const std::vector<CostReport>& reports) {
    std::ostringstream out;
    out << "method,a,r,ops_factor,mem_factor_lb,mem_factor_ub,extra_params_factor,dense_macs\n";
    out << std::setprecision(17);
    for (const auto& r : reports) {
        out << to_string(r.method) << ',' << r.active_ratio << ',' << r.rank << ',' << r.ops_factor << ','
            << r.mem_factor_lb << ',' << r.mem_factor_ub << ',' << r.extra_params_factor << ',' << r.dense_macs
            << '\n';
    }
    return out.str();
}

std::string format_table(const std::vector<CostReport>& reports, const BlockShape& shape) {
    std::ostringstream out;
    out << "block d=" << shape.d << " m=" << shape.m << "  dense MACs " << dense_block_macs(shape) << '\n';
    out << std::left << std::setw(10) << "method" << std::right << std::setw(8) << "a" << std::setw(6) << "r"
        << std::setw(12) << "ops" << std::setw(12) << "mem(lb)" << std::setw(12) << "mem(ub)" << std::setw(14)
        << "extra params" << '\n';
    out << std::fixed;
    for (const auto& r : reports) {
        out << std::left << std::setw(10) << to_string(r.method) << std::right << std::setprecision(3)
            << std::setw(8) << r.active_ratio << std::setw(6) << r.rank << std::setprecision(5) << std::setw(12)
            << r.ops_factor << std::setw(12) << r.mem_factor_lb << std::setw(12) << r.mem_factor_ub
            << std::setw(14) << r.extra_params_factor << '\n';
    }
    out << "gating overhead (WINA scoring, per token): " << std::scientific << std::setprecision(3)
        << gating_overhead_ratio(shape.d) << " of one d x d GEMV\n";
    return out.str();
}

} // namespace wina
