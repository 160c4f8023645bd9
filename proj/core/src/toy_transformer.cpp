// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "wina/toy_transformer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wina/errors.hpp"
#include "wina/random.hpp"

namespace wina {

std::string_view to_string(BlockSlot s) noexcept {
    switch (s) {
    case BlockSlot::q:
        return "w_q";
    case BlockSlot::k:
        return "w_k";
    case BlockSlot::v:
        return "w_v";
    case BlockSlot::o:
        return "w_o";
    case BlockSlot::gate:
        return "w_gate";
    case BlockSlot::up:
        return "w_up";
    case BlockSlot::down:
        return "w_down";
    }
    return "?";
}

const Matrix& ToyDecoderBlock::slot(BlockSlot s) const {
    switch (s) {
    case BlockSlot::q:
        return w_q;
    case BlockSlot::k:
        return w_k;
    case BlockSlot::v:
        return w_v;
    case BlockSlot::o:
        return w_o;
    case BlockSlot::gate:
        return w_gate;
    case BlockSlot::up:
        return w_up;
    case BlockSlot::down:
        return w_down;
    }
    throw InvalidInput("unknown block slot");
}

Matrix& ToyDecoderBlock::slot(BlockSlot s) {
    return const_cast<Matrix&>(std::as_const(*this).slot(s));
}

namespace {

void expect_shape(const Matrix& w, std::size_t rows, std::size_t cols, std::string_view name) {
    if (w.rows() != rows || w.cols() != cols) {
        throw InvalidInput("block: " + std::string(name) + " is " + std::to_string(w.rows()) + "x" +
                           std::to_string(w.cols()) + ", expected " + std::to_string(rows) + "x" +
                           std::to_string(cols));
    }
}

} // namespace

void ToyDecoderBlock::validate() const {
    if (d == 0 || m == 0 || heads == 0) {
        throw InvalidInput("block: d, m and heads must be positive");
    }
    if (d % heads != 0) {
        throw InvalidInput("block: d=" + std::to_string(d) + " is not divisible by heads=" + std::to_string(heads));
    }
    for (BlockSlot s : {BlockSlot::q, BlockSlot::k, BlockSlot::v, BlockSlot::o}) {
        expect_shape(slot(s), d, d, to_string(s));
    }
    expect_shape(w_gate, m, d, "w_gate");
    expect_shape(w_up, m, d, "w_up");
    expect_shape(w_down, d, m, "w_down");
    if (w_emb.rows() == 0) {
        throw InvalidInput("block: empty vocabulary");
    }
    expect_shape(w_emb, w_emb.rows(), d, "w_emb");
    expect_shape(w_head, w_emb.rows(), d, "w_head");
    if (attn_residual) {
        expect_shape(*attn_residual, d, d, "attn_residual");
    }
}

ToyDecoderBlock random_block(std::size_t d, std::size_t m, std::size_t heads, std::size_t vocab,
                             std::uint64_t seed) {
    ToyDecoderBlock b;
    b.d = d;
    b.m = m;
    b.heads = heads;
    std::uint64_t tag = 0;
    auto next = [&](std::size_t rows, std::size_t cols) { return kaiming_init(rows, cols, derive_seed(seed, {++tag})); };
    b.w_q = next(d, d);
    b.w_k = next(d, d);
    b.w_v = next(d, d);
    b.w_o = next(d, d);
    b.w_gate = next(m, d);
    b.w_up = next(m, d);
    b.w_down = next(d, m);
    b.w_emb = gaussian_matrix(vocab, d, derive_seed(seed, {++tag}));
    b.w_head = next(vocab, d);
    b.validate();
    return b;
}

ToyDecoderBlock identity_block(std::size_t d, std::size_t heads) {
    ToyDecoderBlock b;
    b.d = d;
    b.m = d;
    b.heads = heads;
    const Matrix eye = Matrix::identity(d);
    b.w_q = b.w_k = b.w_v = b.w_o = eye;
    b.w_gate = b.w_up = b.w_down = eye;
    b.w_emb = b.w_head = eye;
    b.validate();
    return b;
}

Vector rmsnorm(const Vector& x) {
    if (x.empty()) {
        throw InvalidInput("rmsnorm: empty vector");
    }
    double ms = 0.0;
    for (double v : x) {
        ms += v * v;
    }
    ms /= static_cast<double>(x.size());
    return (1.0 / std::sqrt(ms + kRmsNormEps)) * x;
}

namespace {

std::size_t slot_input_width(const ToyDecoderBlock& b, BlockSlot s) {
    return b.slot(s).cols();
}

SlotGate rule_for(GateMethod method, std::size_t width, double sparsity) {
    if (method == GateMethod::rsparse) {
        throw InvalidInput("block gating supports teal and wina rules only");
    }
    return TopKRule{method, keep_count(sparsity, width)};
}

// Resolves the slot gate for one token and applies it.
class SlotGater {
public:
    SlotGater(const ToyDecoderBlock& block, const BlockGating* gating) : block_(block), gating_(gating) {}

    Vector operator()(BlockSlot s, const Vector& input) {
        if (gating_ == nullptr) {
            return input;
        }
        const SlotGate* g = (*gating_)[s];
        if (g == nullptr) {
            return input;
        }
        if (const auto* mask = std::get_if<GateMask>(g)) {
            return apply_gate(input, *mask);
        }
        const auto& rule = std::get<TopKRule>(*g);
        if (rule.k > input.size()) {
            throw InvalidInput("block gating: k exceeds input width of " + std::string(to_string(s)));
        }
        if (rule.method == GateMethod::wina) {
            auto& c = norms_[static_cast<std::size_t>(s)];
            if (!c) {
                c = column_norms(block_.slot(s));
            }
            return apply_gate(input, gate_wina(input, *c, rule.k));
        }
        if (rule.method == GateMethod::rsparse) {
            throw InvalidInput("block gating supports teal and wina rules only");
        }
        return apply_gate(input, gate_magnitude(input, rule.k));
    }

private:
    const ToyDecoderBlock& block_;
    const BlockGating* gating_;
    std::array<std::optional<Vector>, 7> norms_;
};

Vector row_vector(const Matrix& x, std::size_t t) {
    const auto r = x.row(t);
    return Vector(std::vector<double>(r.begin(), r.end()));
}

void check_gating(const ToyDecoderBlock& block, const BlockGating& gating) {
    for (BlockSlot s : kBlockSlots) {
        const SlotGate* g = gating[s];
        if (g == nullptr) {
            continue;
        }
        if (const auto* mask = std::get_if<GateMask>(g); mask && mask->n() != slot_input_width(block, s)) {
            throw InvalidInput("block gating: mask for " + std::string(to_string(s)) + " has length " +
                               std::to_string(mask->n()) + ", expected " +
                               std::to_string(slot_input_width(block, s)));
        }
    }
}

} // namespace

BlockGating BlockGating::uniform(const ToyDecoderBlock& block, GateMethod method, double sparsity) {
    BlockGating g;
    for (BlockSlot s : kBlockSlots) {
        g.slots[static_cast<std::size_t>(s)] = rule_for(method, slot_input_width(block, s), sparsity);
    }
    return g;
}

BlockGating BlockGating::per_slot(const ToyDecoderBlock& block, GateMethod method, std::span<const double> sparsity) {
    if (sparsity.size() != kBlockSlots.size()) {
        throw InvalidInput("BlockGating::per_slot: expected 7 sparsities, got " + std::to_string(sparsity.size()));
    }
    BlockGating g;
    for (BlockSlot s : kBlockSlots) {
        const auto i = static_cast<std::size_t>(s);
        g.slots[i] = rule_for(method, slot_input_width(block, s), sparsity[i]);
    }
    return g;
}

TokenBatch block_forward(const ToyDecoderBlock& block, const TokenBatch& batch, const BlockGating* gating,
                         BlockTrace* trace) {
    block.validate();
    const std::size_t T = batch.t();
    const std::size_t d = block.d;
    if (T == 0) {
        throw InvalidInput("block_forward: empty token batch");
    }
    if (batch.x.cols() != d) {
        throw InvalidInput("block_forward: hidden states have width " + std::to_string(batch.x.cols()) +
                           ", block expects " + std::to_string(d));
    }
    if (gating != nullptr) {
        check_gating(block, *gating);
    }
    SlotGater gate(block, gating);
    auto record = [&](BlockSlot s, const Vector& v) {
        if (trace != nullptr) {
            trace->slot_inputs[static_cast<std::size_t>(s)].push_back(v);
        }
    };
    auto project = [&](BlockSlot s, const Vector& input) {
        record(s, input);
        return matvec(block.slot(s), gate(s, input));
    };

    // Attention projections.
    std::vector<Vector> q(T), k(T), v(T);
    for (std::size_t t = 0; t < T; ++t) {
        const Vector xn = rmsnorm(row_vector(batch.x, t));
        q[t] = project(BlockSlot::q, xn);
        k[t] = project(BlockSlot::k, xn);
        v[t] = project(BlockSlot::v, xn);
    }

    const std::size_t dh = d / block.heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    std::vector<Vector> heads_out(T, Vector(d));
    if (trace != nullptr) {
        trace->attention.assign(block.heads, Matrix(T, T));
    }
    std::vector<double> probs(T);
    for (std::size_t h = 0; h < block.heads; ++h) {
        const std::size_t off = h * dh;
        for (std::size_t t = 0; t < T; ++t) {
            // Causal: token t attends to s <= t.
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s <= t; ++s) {
                double acc = 0.0;
                for (std::size_t j = 0; j < dh; ++j) {
                    acc += q[t][off + j] * k[s][off + j];
                }
                probs[s] = acc * scale;
                mx = std::max(mx, probs[s]);
            }
            double total = 0.0;
            for (std::size_t s = 0; s <= t; ++s) {
                probs[s] = std::exp(probs[s] - mx);
                total += probs[s];
            }
            for (std::size_t s = 0; s <= t; ++s) {
                probs[s] /= total;
                if (trace != nullptr) {
                    trace->attention[h](t, s) = probs[s];
                }
                for (std::size_t j = 0; j < dh; ++j) {
                    heads_out[t][off + j] += probs[s] * v[s][off + j];
                }
            }
        }
    }

    TokenBatch out{Matrix(T, d)};
    for (std::size_t t = 0; t < T; ++t) {
        const Vector x = row_vector(batch.x, t);
        const Vector o = project(BlockSlot::o, heads_out[t]);
        Vector x1 = (block.attn_residual ? matvec(*block.attn_residual, x) : x) + o;

        const Vector n = rmsnorm(x1);
        const Vector g = project(BlockSlot::gate, n);
        const Vector u = project(BlockSlot::up, n);
        Vector mlp(block.m);
        for (std::size_t i = 0; i < block.m; ++i) {
            mlp[i] = silu(g[i]) * u[i];
        }
        const Vector z = project(BlockSlot::down, mlp);
        auto row = out.x.row(t);
        for (std::size_t i = 0; i < d; ++i) {
            row[i] = x1[i] + z[i];
        }
    }
    return out;
}

Matrix model_forward(const ToyDecoderBlock& block, std::span<const std::size_t> tokens, const BlockGating* gating) {
    block.validate();
    if (tokens.empty()) {
        throw InvalidInput("model_forward: empty token sequence");
    }
    TokenBatch batch{Matrix(tokens.size(), block.d)};
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        if (tokens[t] >= block.vocab()) {
            throw InvalidInput("model_forward: token id " + std::to_string(tokens[t]) + " outside vocabulary of " +
                               std::to_string(block.vocab()));
        }
        const auto e = block.w_emb.row(tokens[t]);
        std::copy(e.begin(), e.end(), batch.x.row(t).begin());
    }
    const TokenBatch y = block_forward(block, batch, gating);
    Matrix logits(tokens.size(), block.vocab());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        const Vector l = matvec(block.w_head, rmsnorm(row_vector(y.x, t)));
        std::copy(l.begin(), l.end(), logits.row(t).begin());
    }
    return logits;
}

std::array<std::size_t, 7> slot_parameters(const ToyDecoderBlock& block) {
    std::array<std::size_t, 7> p{};
    for (BlockSlot s : kBlockSlots) {
        const Matrix& w = block.slot(s);
        p[static_cast<std::size_t>(s)] = w.rows() * w.cols();
    }
    return p;
}

} // namespace wina
