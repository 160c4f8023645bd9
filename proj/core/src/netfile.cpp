// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "wina/netfile.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wina {

namespace {

using nlohmann::json;

const json& member(const json& obj, const std::string& ptr, const char* key) {
    if (!obj.is_object()) {
        throw NetFileError(ptr.empty() ? "/" : ptr, "expected an object");
    }
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw NetFileError(ptr + "/" + key, "missing required field");
    }
    return *it;
}

std::size_t dimension(const json& obj, const std::string& ptr, const char* key) {
    const json& v = member(obj, ptr, key);
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) {
        throw NetFileError(ptr + "/" + key, "expected a positive integer");
    }
    return v.get<std::size_t>();
}

Matrix parse_matrix(const json& obj, const std::string& ptr) {
    const std::size_t rows = dimension(obj, ptr, "rows");
    const std::size_t cols = dimension(obj, ptr, "cols");
    const json& data = member(obj, ptr, "data");
    if (!data.is_array()) {
        throw NetFileError(ptr + "/data", "expected an array");
    }
    if (data.size() != rows * cols) {
        throw NetFileError(ptr + "/data", "expected " + std::to_string(rows * cols) + " values for a " +
                                              std::to_string(rows) + "x" + std::to_string(cols) +
                                              " matrix, found " + std::to_string(data.size()));
    }
    std::vector<double> values(rows * cols);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const json& v = data[i];
        if (!v.is_number()) {
            throw NetFileError(ptr + "/data/" + std::to_string(i), "expected a number");
        }
        values[i] = v.get<double>();
        if (!std::isfinite(values[i])) {
            throw NetFileError(ptr + "/data/" + std::to_string(i), "non-finite value");
        }
    }
    return Matrix(rows, cols, std::move(values));
}

json matrix_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

constexpr const char* kBlockKeys[] = {"w_q", "w_k", "w_v", "w_o", "w_gate", "w_up", "w_down", "w_emb", "w_head"};

Matrix& block_member(ToyDecoderBlock& b, std::size_t i) {
    Matrix* slots[] = {&b.w_q, &b.w_k, &b.w_v, &b.w_o, &b.w_gate, &b.w_up, &b.w_down, &b.w_emb, &b.w_head};
    return *slots[i];
}

const Matrix& block_member(const ToyDecoderBlock& b, std::size_t i) {
    return block_member(const_cast<ToyDecoderBlock&>(b), i);
}

} // namespace

NetFile parse_netfile(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw NetFileError("/", std::string("not valid JSON (") + e.what() + ")");
    }
    const json& version = member(doc, "", "format_version");
    if (!version.is_number_integer() || version.get<int>() != 1) {
        throw NetFileError("/format_version", "unsupported version (expected 1)");
    }
    const json& kind = member(doc, "", "kind");
    if (!kind.is_string()) {
        throw NetFileError("/kind", "expected a string");
    }
    NetFile net;
    const std::string k = kind.get<std::string>();
    if (k == "chain") {
        net.kind = NetKind::chain;
        Activation act = Activation::linear;
        if (doc.contains("activation")) {
            try {
                act = parse_activation(doc["activation"].get<std::string>());
            } catch (const std::exception& e) {
                throw NetFileError("/activation", e.what());
            }
        }
        const json& layers = member(doc, "", "layers");
        if (!layers.is_array() || layers.empty()) {
            throw NetFileError("/layers", "expected a non-empty array");
        }
        std::vector<Matrix> ws;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            ws.push_back(parse_matrix(layers[l], "/layers/" + std::to_string(l)));
            if (l > 0 && ws[l].cols() != ws[l - 1].rows()) {
                throw NetFileError("/layers/" + std::to_string(l) + "/cols",
                                   "layer consumes " + std::to_string(ws[l].cols()) + " inputs but layer " +
                                       std::to_string(l - 1) + " produces " + std::to_string(ws[l - 1].rows()));
            }
        }
        net.chain = LinearChain(std::move(ws), act);
        if (doc.contains("input_rotation")) {
            net.input_rotation = parse_matrix(doc["input_rotation"], "/input_rotation");
            if (net.input_rotation->rows() != net.chain.input_dim() ||
                net.input_rotation->cols() != net.chain.input_dim()) {
                throw NetFileError("/input_rotation", "must be square with the chain's input dimension");
            }
        }
    } else if (k == "block") {
        net.kind = NetKind::block;
        ToyDecoderBlock& b = net.block;
        b.d = dimension(doc, "", "d");
        b.m = dimension(doc, "", "m");
        b.heads = dimension(doc, "", "heads");
        const json& slots = member(doc, "", "slots");
        for (std::size_t i = 0; i < std::size(kBlockKeys); ++i) {
            block_member(b, i) = parse_matrix(member(slots, "/slots", kBlockKeys[i]),
                                              std::string("/slots/") + kBlockKeys[i]);
        }
        if (slots.contains("attn_residual")) {
            b.attn_residual = parse_matrix(slots["attn_residual"], "/slots/attn_residual");
        }
        try {
            b.validate();
        } catch (const InvalidInput& e) {
            throw NetFileError("/slots", e.what());
        }
    } else {
        throw NetFileError("/kind", "expected \"chain\" or \"block\", found \"" + k + "\"");
    }
    return net;
}

NetFile load_netfile(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open network file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_netfile(buf.str());
}

std::string to_json(const NetFile& net) {
    json doc = {{"format_version", 1}};
    if (net.kind == NetKind::chain) {
        doc["kind"] = "chain";
        doc["activation"] = std::string(to_string(net.chain.activation()));
        json layers = json::array();
        for (const auto& w : net.chain.layers()) {
            layers.push_back(matrix_json(w));
        }
        doc["layers"] = std::move(layers);
        if (net.input_rotation) {
            doc["input_rotation"] = matrix_json(*net.input_rotation);
        }
    } else {
        const ToyDecoderBlock& b = net.block;
        doc["kind"] = "block";
        doc["d"] = b.d;
        doc["m"] = b.m;
        doc["heads"] = b.heads;
        json slots = json::object();
        for (std::size_t i = 0; i < std::size(kBlockKeys); ++i) {
            slots[kBlockKeys[i]] = matrix_json(block_member(b, i));
        }
        if (b.attn_residual) {
            slots["attn_residual"] = matrix_json(*b.attn_residual);
        }
        doc["slots"] = std::move(slots);
    }
    return doc.dump() + "\n";
}

void save_netfile(const NetFile& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInput("cannot write network file '" + path + "'");
    }
    out << to_json(net);
    if (!out) {
        throw InvalidInput("failed writing network file '" + path + "'");
    }
}

} // namespace wina
