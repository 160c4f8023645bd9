// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "wina/netfile.hpp"
#include "wina/ortho.hpp"
#include "wina/random.hpp"

using namespace wina;

namespace {

std::string pointer_of(const std::string& text) {
    try {
        parse_netfile(text);
    } catch (const NetFileError& e) {
        return e.pointer();
    }
    return "<accepted>";
}

const char* kTwoLayer = R"({"format_version": 1, "kind": "chain", "activation": "linear",
  "layers": [{"rows": 2, "cols": 3, "data": [1, 2, 3, 4, 5, 6]},
             {"rows": 1, "cols": 2, "data": [0.5, -1]}]})";

} // namespace

TEST(NetFile, ParsesChain) {
    const NetFile net = parse_netfile(kTwoLayer);
    ASSERT_EQ(net.kind, NetKind::chain);
    ASSERT_EQ(net.chain.depth(), 2u);
    EXPECT_EQ(net.chain.layer(0), Matrix::from_rows({{1, 2, 3}, {4, 5, 6}}));
    EXPECT_EQ(net.chain.activation(), Activation::linear);
    EXPECT_FALSE(net.input_rotation.has_value());
}

TEST(NetFile, ChainRoundTripIsExact) {
    const std::vector<std::size_t> dims{5, 7, 3};
    NetFile net;
    net.chain = random_chain(dims, Activation::silu, 17);
    net.input_rotation = gaussian_matrix(5, 5, 18);
    const NetFile back = parse_netfile(to_json(net));
    EXPECT_EQ(back.chain.layers(), net.chain.layers());
    EXPECT_EQ(back.chain.activation(), Activation::silu);
    ASSERT_TRUE(back.input_rotation.has_value());
    EXPECT_EQ(*back.input_rotation, *net.input_rotation);
}

TEST(NetFile, BlockRoundTripIsExact) {
    NetFile net;
    net.kind = NetKind::block;
    net.block = orthogonalize_block(random_block(8, 12, 2, 10, 3));
    const NetFile back = parse_netfile(to_json(net));
    ASSERT_EQ(back.kind, NetKind::block);
    for (BlockSlot s : kBlockSlots) {
        EXPECT_EQ(back.block.slot(s), net.block.slot(s)) << to_string(s);
    }
    EXPECT_EQ(back.block.w_emb, net.block.w_emb);
    EXPECT_EQ(back.block.w_head, net.block.w_head);
    ASSERT_TRUE(back.block.attn_residual.has_value());
    EXPECT_EQ(*back.block.attn_residual, *net.block.attn_residual);
    EXPECT_EQ(back.block.heads, 2u);
}

TEST(NetFile, FileRoundTrip) {
    const auto path = (std::filesystem::temp_directory_path() / "wina_netfile_test.json").string();
    const NetFile net = parse_netfile(kTwoLayer);
    save_netfile(net, path);
    EXPECT_EQ(load_netfile(path).chain.layers(), net.chain.layers());
    std::remove(path.c_str());
    EXPECT_THROW(load_netfile(path), InvalidInput);
}

TEST(NetFile, ErrorPointers) {
    EXPECT_EQ(pointer_of("{not json"), "/");
    EXPECT_EQ(pointer_of("[]"), "/");
    EXPECT_EQ(pointer_of(R"({"kind": "chain"})"), "/format_version");
    EXPECT_EQ(pointer_of(R"({"format_version": 2, "kind": "chain"})"), "/format_version");
    EXPECT_EQ(pointer_of(R"({"format_version": 1, "kind": "mlp"})"), "/kind");
    EXPECT_EQ(pointer_of(R"({"format_version": 1, "kind": "chain", "layers": []})"), "/layers");
    EXPECT_EQ(pointer_of(R"({"format_version": 1, "kind": "chain", "activation": "relu",
        "layers": [{"rows": 1, "cols": 1, "data": [1]}]})"),
              "/activation");
    EXPECT_EQ(pointer_of(R"({"format_version": 1, "kind": "chain",
        "layers": [{"rows": 1, "cols": 2, "data": [1]}]})"),
              "/layers/0/data");
    EXPECT_EQ(pointer_of(R"({"format_version": 1, "kind": "chain",
        "layers": [{"rows": 1, "cols": 2, "data": [1, "x"]}]})"),
              "/layers/0/data/1");
    EXPECT_EQ(pointer_of(R"({"format_version": 1, "kind": "chain",
        "layers": [{"rows": 0, "cols": 2, "data": []}]})"),
              "/layers/0/rows");
    EXPECT_EQ(pointer_of(R"({"format_version": 1, "kind": "chain",
        "layers": [{"rows": 2, "cols": 1, "data": [1, 2]}, {"rows": 1, "cols": 3, "data": [1, 2, 3]}]})"),
              "/layers/1/cols");
    EXPECT_EQ(pointer_of(R"({"format_version": 1, "kind": "block", "d": 2, "m": 2, "heads": 1, "slots": {}})"),
              "/slots/w_q");
}

TEST(NetFile, BlockShapeMismatchReported) {
    NetFile net;
    net.kind = NetKind::block;
    net.block = random_block(4, 6, 2, 5, 1);
    net.block.w_up = gaussian_matrix(5, 4, 2);
    EXPECT_EQ(pointer_of(to_json(net)), "/slots");
}
