// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include "wina/chain.hpp"
#include "wina/errors.hpp"
#include "wina/toy_transformer.hpp"

namespace wina {

/// Malformed network file; pointer() is the JSON pointer of the offending node.
class NetFileError : public InvalidInput {
public:
    NetFileError(const std::string& pointer, const std::string& message)
        : InvalidInput(pointer + ": " + message), pointer_(pointer) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

enum class NetKind { chain, block };

/// Network interchange document:
///   {"format_version": 1, "kind": "chain", "activation": "linear"|"silu",
///    "layers": [{"rows": r, "cols": c, "data": [row-major values]}, ...],
///    "input_rotation": {...}}                               (optional)
///   {"format_version": 1, "kind": "block", "d": .., "m": .., "heads": ..,
///    "slots": {"w_q": {...}, ..., "w_emb": {...}, "w_head": {...},
///              "attn_residual": {...}}}                     (attn_residual optional)
struct NetFile {
    NetKind kind = NetKind::chain;
    LinearChain chain;
    ToyDecoderBlock block;
    std::optional<Matrix> input_rotation;
};

NetFile parse_netfile(const std::string& text);
NetFile load_netfile(const std::string& path);
std::string to_json(const NetFile& net);
void save_netfile(const NetFile& net, const std::string& path);

} // namespace wina
