// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "wina/random.hpp"

#include <cmath>
#include <numbers>

namespace wina {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t state = base;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t t : tags) {
        state = h ^ (t + 0x632BE59BD9B4E019ULL);
        h = splitmix64(state);
    }
    return h;
}

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

} // namespace

Rng::Rng(std::uint64_t seed) noexcept {
    std::uint64_t state = seed;
    for (auto& s : s_) {
        s = splitmix64(state);
    }
}

std::uint64_t Rng::next_u64() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

__extension__ typedef unsigned __int128 u128;

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection; unbiased.
    if (bound == 0) {
        return 0;
    }
    while (true) {
        const u128 m = static_cast<u128>(next_u64()) * bound;
        const auto low = static_cast<std::uint64_t>(m);
        if (low >= bound || low >= (0 - bound) % bound) {
            return static_cast<std::uint64_t>(m >> 64);
        }
    }
}

double Rng::normal() noexcept {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

Matrix kaiming_init(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    const double stddev = std::sqrt(2.0 / static_cast<double>(cols));
    std::vector<double> data(rows * cols);
    for (double& v : data) {
        v = stddev * rng.normal();
    }
    return Matrix(rows, cols, std::move(data));
}

Vector gaussian_vector(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> data(n);
    for (double& v : data) {
        v = rng.normal();
    }
    return Vector(std::move(data));
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> data(rows * cols);
    for (double& v : data) {
        v = rng.normal();
    }
    return Matrix(rows, cols, std::move(data));
}

} // namespace wina
