// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wina/allocator.hpp"

namespace wina {

/// Decoder block with hidden size d and MLP width m. Its seven GEMVs are
/// q, k, v, o (d x d each), gate and up (m x d) and down (d x m).
struct BlockShape {
    std::size_t d = 1;
    std::size_t m = 1;

    void validate() const;
};

enum class CostMethod { dense, teal, wina, rsparse };

std::string_view to_string(CostMethod m) noexcept;
CostMethod parse_cost_method(std::string_view name);

enum class MemBound { lb, ub };

MemBound parse_mem_bound(std::string_view name);

struct CostReport {
    CostMethod method = CostMethod::dense;
    double active_ratio = 1.0;
    std::size_t rank = 0;
    double ops_factor = 1.0;
    double mem_factor_lb = 1.0;
    double mem_factor_ub = 1.0;
    double extra_params_factor = 0.0;
    std::uint64_t dense_macs = 0;
};

/// One GEMV of the block: in_dim inputs, out_dim outputs.
struct GemvShape {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
};

/// The seven GEMVs in q, k, v, o, gate, up, down order.
std::vector<GemvShape> block_gemvs(const BlockShape& shape);

/// 4 d^2 + 3 d m.
std::uint64_t dense_block_macs(const BlockShape& shape);

double ops_factor(CostMethod method, double a, std::size_t r, const BlockShape& shape);
double mem_factor(CostMethod method, double a, std::size_t r, const BlockShape& shape, MemBound bound);
double extra_params_factor(CostMethod method, std::size_t r, const BlockShape& shape);

/// Per-token scoring cost relative to one d x d GEMV: 1 / d.
double gating_overhead_ratio(std::size_t d);

/// 1 - sum_i (1 - s_i) n_in n_out / (4 d^2 + 3 d m) over the plan's seven slots.
double flops_savings(const BlockShape& shape, const AllocationPlan& plan);

CostReport cost_report(CostMethod method, double a, std::size_t r, const BlockShape& shape);

/// Rows for all four methods, as in the summary table.
std::vector<CostReport> cost_summary(double a, std::size_t r, const BlockShape& shape);

std::string to_json(const std::vector<CostReport>& reports, const BlockShape& shape);
/// Columns: method,a,r,ops_factor,mem_factor_lb,mem_factor_ub,extra_params_factor,dense_macs.
std::string to_csv(const std::vector<CostReport>& reports);
std::string format_table(const std::vector<CostReport>& reports, const BlockShape& shape);

} // namespace wina
