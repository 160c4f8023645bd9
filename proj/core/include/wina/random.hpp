// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>

#include "wina/linalg.hpp"

namespace wina {

/// One step of SplitMix64 (Steele, Lea, Flood 2014). Used for seeding and key mixing.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Mixes a base seed with a list of integer tags into an independent stream seed.
/// The result depends only on the arguments, so per-trial streams are
/// schedule-independent.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept;

/// xoshiro256** 1.0 (Blackman, Vigna) seeded through SplitMix64.
///
/// Normal deviates use the Box-Muller transform on 53-bit uniforms in (0, 1],
/// consuming two uniforms per pair and caching the second deviate. The
/// whole pipeline is integer arithmetic plus std::log/sqrt/cos/sin, so
/// seeds reproduce across platforms with a conforming libm.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) noexcept;
    double normal() noexcept;

private:
    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Kaiming-normal init, fan-in mode with gain sqrt(2): entries ~ N(0, 2/cols).
Matrix kaiming_init(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// i.i.d. N(0, 1) entries.
Vector gaussian_vector(std::size_t n, std::uint64_t seed);

/// i.i.d. N(0, 1) entries.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

} // namespace wina
