// Copyright 2026 The WINA Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "wina/random.hpp"

using namespace wina;

TEST(Splitmix64, KnownSequence) {
    // Reference outputs of the splitmix64 generator seeded with 0.
    std::uint64_t state = 0;
    EXPECT_EQ(splitmix64(state), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(splitmix64(state), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(splitmix64(state), 0x06C45D188009454FULL);
}

TEST(Kaiming, DeterministicAndSeedSensitive) {
    EXPECT_EQ(kaiming_init(1, 1, 3)(0, 0), kaiming_init(1, 1, 3)(0, 0));
    EXPECT_EQ(kaiming_init(8, 8, 1).data(), kaiming_init(8, 8, 1).data());
    EXPECT_NE(kaiming_init(8, 8, 1).data(), kaiming_init(8, 8, 2).data());
}

TEST(Kaiming, FanInStd) {
    const Matrix w = kaiming_init(256, 1024, 11);
    const auto& d = w.data();
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    double ss = 0.0;
    for (double v : d) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(d.size() - 1));
    EXPECT_NEAR(sd, std::sqrt(2.0 / 1024.0), 0.05 * std::sqrt(2.0 / 1024.0));
}

TEST(GaussianVector, Moments) {
    const Vector v = gaussian_vector(100000, 1);
    double mean = 0.0;
    for (double e : v) {
        mean += e;
    }
    mean /= 100000.0;
    double ss = 0.0;
    for (double e : v) {
        ss += (e - mean) * (e - mean);
    }
    const double sd = std::sqrt(ss / 99999.0);
    EXPECT_NEAR(mean, 0.0, 0.02);
    EXPECT_GE(sd, 0.98);
    EXPECT_LE(sd, 1.02);
    EXPECT_EQ(gaussian_vector(5, 9), gaussian_vector(5, 9));
    EXPECT_TRUE(std::isfinite(gaussian_vector(1, 4)[0]));
}

TEST(Rng, BelowStaysInRange) {
    Rng rng(3);
    std::vector<int> hist(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = rng.below(7);
        ASSERT_LT(v, 7u);
        ++hist[v];
    }
    for (int h : hist) {
        EXPECT_GT(h, 800);
    }
}

TEST(DeriveSeed, DistinctTagsGiveDistinctSeeds) {
    EXPECT_NE(derive_seed(0, {1}), derive_seed(0, {2}));
    EXPECT_NE(derive_seed(0, {1, 2}), derive_seed(0, {2, 1}));
    EXPECT_EQ(derive_seed(5, {1, 2}), derive_seed(5, {1, 2}));
}
