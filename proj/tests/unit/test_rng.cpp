#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hierlag/rng.hpp"

using hierlag::Rng;

TEST(Rng, Reproducible) {
    Rng a(17), b(17), c(18);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
    EXPECT_NE(Rng(17).normal(), c.normal());
    Rng s1(5, 1), s2(5, 1), s3(5, 2);
    EXPECT_EQ(s1.next_u64(), s2.next_u64());
    EXPECT_NE(Rng(5, 1).next_u64(), s3.next_u64());
}

TEST(Rng, TenThousandthOutputIsStandard) {
    // The 10000th output of the default-seeded mt19937_64 is fixed by the
    // C++ standard; seeding with 5489 reproduces it.
    Rng r(5489);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = r.next_u64();
    EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, UniformIsOpenInterval) {
    Rng r(1);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(hi, 1.0);
    EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(Rng, NormalMoments) {
    Rng r(2);
    const int n = 200000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    EXPECT_NEAR(s1 / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.015);
    EXPECT_NEAR(s4 / n, 3.0, 0.08);
    Rng q(3);
    EXPECT_NEAR(q.normal(10.0, 0.0), 10.0, 0.0);
}

TEST(Rng, Quantile) {
    EXPECT_NEAR(hierlag::standard_normal_quantile(0.5), 0.0, 1e-15);
    EXPECT_NEAR(hierlag::standard_normal_quantile(0.975), 1.959963984540054, 1e-12);
    EXPECT_NEAR(hierlag::standard_normal_quantile(0.025), -1.959963984540054, 1e-12);
    EXPECT_NEAR(hierlag::standard_normal_quantile(1e-10), -6.361340902404056, 1e-9);
}

TEST(Rng, UniformIndexCoversRange) {
    Rng r(4);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[r.uniform_index(7)];
    for (int c : counts) EXPECT_NEAR(c, 10000, 500);
    EXPECT_EQ(r.uniform_index(1), 0U);
}

TEST(Rng, SplitMixDecorrelates) {
    EXPECT_NE(hierlag::splitmix64(0), hierlag::splitmix64(1));
    EXPECT_EQ(hierlag::splitmix64(12345), hierlag::splitmix64(12345));
}
