// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "common.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wina::cli {

std::uint64_t default_seed() {
    const char* env = std::getenv("WINA_SEED");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0') {
        throw UsageError(std::string("WINA_SEED='") + env + "' is not a non-negative integer");
    }
    return v;
}

std::vector<std::string> split(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) {
            out.push_back(item.substr(b, e - b + 1));
        }
    }
    return out;
}

std::vector<double> parse_reals(const std::string& csv, const std::string& flag) {
    std::vector<double> out;
    for (const auto& s : split(csv)) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != s.size()) {
            throw UsageError(flag + ": '" + s + "' is not a number");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw UsageError(flag + ": empty list");
    }
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& csv, const std::string& flag) {
    std::vector<std::size_t> out;
    for (const auto& s : split(csv)) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
            throw UsageError(flag + ": '" + s + "' is not a non-negative integer");
        }
        out.push_back(std::stoull(s));
    }
    if (out.empty()) {
        throw UsageError(flag + ": empty list");
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw UsageError("cannot write '" + path + "'");
    }
    out << text;
    if (!out) {
        throw UsageError("failed writing '" + path + "'");
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string replace_extension(const std::string& path, const std::string& suffix) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
        return path.substr(0, dot) + suffix;
    }
    return path + suffix;
}

} // namespace wina::cli
