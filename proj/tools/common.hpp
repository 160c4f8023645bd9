// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace wina::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags or unreadable input; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// WINA_SEED when set and numeric, else 0.
std::uint64_t default_seed();

std::vector<double> parse_reals(const std::string& csv, const std::string& flag);
std::vector<std::size_t> parse_sizes(const std::string& csv, const std::string& flag);
std::vector<std::string> split(const std::string& csv);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// "dir/name.json" -> "dir/name" + suffix.
std::string replace_extension(const std::string& path, const std::string& suffix);

void register_synth_bench(CLI::App& app, int& exit_code);
void register_make_net(CLI::App& app, int& exit_code);
void register_ortho(CLI::App& app, int& exit_code);
void register_allocate(CLI::App& app, int& exit_code);
void register_cost(CLI::App& app, int& exit_code);
void register_gemv_bench(CLI::App& app, int& exit_code);
void register_verify(CLI::App& app, int& exit_code);

/// Runs body, translating toolkit exceptions into exit codes and messages on stderr.
template <class F>
int guarded(const char* command, F&& body);

} // namespace wina::cli

#include "guarded.inl"
