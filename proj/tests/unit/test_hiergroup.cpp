#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hierlag/errors.hpp"
#include "hierlag/hiergroup.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hierlag;
using testing_support::random_vector;

TEST(Structure, Weights) {
    const HierGroupStructure s(2, 3);
    EXPECT_EQ(s.dim(), 6U);
    EXPECT_EQ(s.group_size(1), 6U);
    EXPECT_EQ(s.group_size(3), 2U);
    EXPECT_DOUBLE_EQ(s.weight(1), std::sqrt(6.0));
    EXPECT_DOUBLE_EQ(s.weight(2), 2.0);
    EXPECT_DOUBLE_EQ(s.weight(3), std::sqrt(2.0));
    for (std::size_t l = 1; l < 3; ++l) EXPECT_GT(s.weight(l), s.weight(l + 1));
    EXPECT_THROW(s.weight(0), Error);
    EXPECT_THROW(s.weight(4), Error);
    EXPECT_THROW(HierGroupStructure(0, 3), Error);
    EXPECT_THROW(HierGroupStructure(2, 0), Error);
}

TEST(Structure, MatrixViewIsSeriesMajor) {
    const HierGroupStructure s(2, 3);
    CoefVector b(6);
    b << 1, 2, 3, 4, 5, 6;
    const auto m = s.as_matrix(b);
    EXPECT_EQ(m(0, 0), 1.0);
    EXPECT_EQ(m(2, 0), 3.0);
    EXPECT_EQ(m(0, 1), 4.0);
    EXPECT_EQ(s.index(1, 2), 5U);
}

TEST(GroupNorm, Examples) {
    const HierGroupStructure s(2, 3);
    EXPECT_NEAR(group_norm(s, CoefVector::Ones(6)), 12.0, 1e-14);
    EXPECT_EQ(group_norm(s, CoefVector::Zero(6)), 0.0);
    CoefVector tail = CoefVector::Zero(6);
    tail(2) = 1.0;
    tail(5) = 1.0;
    const double want = (std::sqrt(6.0) + 2.0 + std::sqrt(2.0)) * std::sqrt(2.0);
    EXPECT_NEAR(group_norm(s, tail), want, 1e-14);
    EXPECT_NEAR(oracle::group_norm_loops(2, 3, tail), want, 1e-14);
    EXPECT_THROW(group_norm(s, CoefVector::Zero(5)), Error);
}

TEST(GroupNorm, MatchesLoopOracle) {
    std::mt19937_64 gen(1);
    for (std::size_t M = 1; M <= 4; ++M) {
        for (std::size_t L = 1; L <= 5; ++L) {
            const HierGroupStructure s(M, L);
            const CoefVector b = random_vector(gen, static_cast<Eigen::Index>(M * L));
            EXPECT_NEAR(group_norm(s, b), oracle::group_norm_loops(M, L, b), 1e-12);
        }
    }
}

TEST(GroupNorm, NormAxioms) {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> g;
    const HierGroupStructure s(3, 4);
    for (int k = 0; k < 200; ++k) {
        const CoefVector a = random_vector(gen, 12);
        const CoefVector b = random_vector(gen, 12);
        const double c = g(gen);
        EXPECT_GE(group_norm(s, a), 0.0);
        EXPECT_GT(group_norm(s, a), 0.0);
        EXPECT_NEAR(group_norm(s, c * a), std::abs(c) * group_norm(s, a), 1e-12 * (1.0 + group_norm(s, a)));
        EXPECT_LE(group_norm(s, a + b), group_norm(s, a) + group_norm(s, b) + 1e-12);
    }
}

TEST(DualBound, Examples) {
    const HierGroupStructure s(2, 4);
    CoefVector a = CoefVector::Zero(8);
    EXPECT_EQ(dual_norm_upper_bound(s, a), 0.0);
    a(3) = -2.0;
    a(5) = 1.0;
    EXPECT_DOUBLE_EQ(dual_norm_upper_bound(s, a), 1.0);
    EXPECT_THROW(dual_norm_upper_bound(s, CoefVector::Zero(3)), Error);
}

TEST(DualBound, HolderAgainstRandomDirections) {
    // <alpha, beta> <= N*(alpha) N(beta) <= bound * N(beta) for all beta.
    std::mt19937_64 gen(3);
    const HierGroupStructure s(2, 3);
    for (int k = 0; k < 500; ++k) {
        const CoefVector a = random_vector(gen, 6);
        const CoefVector b = random_vector(gen, 6);
        EXPECT_LE(a.dot(b), dual_norm_upper_bound(s, a) * group_norm(s, b) + 1e-12);
    }
}

TEST(DualBound, ProjectedAscentStaysBelow) {
    std::mt19937_64 gen(4);
    const HierGroupStructure s(2, 3);
    for (int k = 0; k < 10; ++k) {
        const CoefVector a = random_vector(gen, 6);
        const double found = oracle::dual_norm_ascent(s, a, 100 + static_cast<std::uint64_t>(k), 3, 150);
        EXPECT_LE(found, dual_norm_upper_bound(s, a) + 1e-6);
        EXPECT_GT(found, 0.0);
    }
}

TEST(ProxSingle, Examples) {
    const HierGroupStructure one(1, 1);
    CoefVector b(1);
    b << 3.0;
    EXPECT_NEAR(prox_single_group(one, b, 1, 1.0)(0), 2.0, 1e-15);
    EXPECT_EQ(prox_single_group(one, b, 1, 0.0), b);

    const HierGroupStructure s(2, 3);
    CoefVector v(6);
    v << 5, 0.1, 0.1, 5, 0.1, 0.1;
    // G_2 has norm 0.2 and weight 2: any threshold >= 0.1 zeroes it.
    const CoefVector out = prox_single_group(s, v, 2, 0.2);
    EXPECT_EQ(out(0), 5.0);
    EXPECT_EQ(out(3), 5.0);
    EXPECT_EQ(out(1), 0.0);
    EXPECT_EQ(out(2), 0.0);
    EXPECT_EQ(out(4), 0.0);
    EXPECT_EQ(out(5), 0.0);
}

TEST(ProxSingle, TieGoesToZero) {
    const HierGroupStructure s(1, 1);
    CoefVector b(1);
    b << 2.0;
    EXPECT_EQ(prox_single_group(s, b, 1, 2.0)(0), 0.0);
}

TEST(ProxSingle, ScalesBlockOnly) {
    const HierGroupStructure s(2, 2);
    CoefVector b(4);
    b << 1, 3, 2, 4;  // G_2 = {3, 4}, norm 5, weight sqrt(2)
    const double t = 1.0 / std::sqrt(2.0);
    const CoefVector out = prox_single_group(s, b, 2, t);
    EXPECT_EQ(out(0), 1.0);
    EXPECT_EQ(out(2), 2.0);
    EXPECT_NEAR(out(1), 3.0 * 0.8, 1e-15);
    EXPECT_NEAR(out(3), 4.0 * 0.8, 1e-15);
}

TEST(ProxHier, ZeroThresholdIsIdentity) {
    std::mt19937_64 gen(5);
    const HierGroupStructure s(3, 4);
    const CoefVector b = random_vector(gen, 12);
    EXPECT_EQ(prox_hier(s, b, 0.0), b);
}

TEST(ProxHier, EqualsCompositionOfSingleGroups) {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> thr(0.0, 1.5);
    for (int k = 0; k < 100; ++k) {
        const HierGroupStructure s(1 + static_cast<std::size_t>(k % 3), 1 + static_cast<std::size_t>(k % 5));
        const CoefVector b = random_vector(gen, static_cast<Eigen::Index>(s.dim()));
        const double t = thr(gen);
        CoefVector want = b;
        for (std::size_t l = s.lag(); l >= 1; --l) want = prox_single_group(s, want, l, t);
        EXPECT_LT((prox_hier(s, b, t) - want).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(ProxHier, MatchesDualOracle) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> thr(0.0, 2.0);
    for (int k = 0; k < 30; ++k) {
        const std::size_t M = 1 + static_cast<std::size_t>(k % 3);
        const std::size_t L = 1 + static_cast<std::size_t>(k % 4);
        const HierGroupStructure s(M, L);
        const CoefVector b = random_vector(gen, static_cast<Eigen::Index>(M * L), 2.0);
        const double t = thr(gen);
        const CoefVector got = prox_hier(s, b, t);
        const CoefVector want = oracle::prox_dual_bcd(M, L, b, t);
        EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-5) << "M=" << M << " L=" << L << " t=" << t;
    }
}

TEST(ProxHier, HierarchicalSparsity) {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> thr(0.0, 1.0);
    for (int k = 0; k < 300; ++k) {
        const HierGroupStructure s(2, 5);
        const CoefVector out = prox_hier(s, random_vector(gen, 10), thr(gen));
        const std::size_t z = first_zero_group(s, out);
        for (std::size_t l = z; l <= 5; ++l) EXPECT_EQ(group_block_norm(s, out, l), 0.0);
        EXPECT_TRUE(zero_groups_suffix_closed(s, out));
    }
}

TEST(ProxHier, Nonexpansive) {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> thr(0.0, 1.0);
    const HierGroupStructure s(3, 4);
    for (int k = 0; k < 500; ++k) {
        const CoefVector a = random_vector(gen, 12);
        const CoefVector b = random_vector(gen, 12);
        const double t = thr(gen);
        EXPECT_LE((prox_hier(s, a, t) - prox_hier(s, b, t)).norm(), (a - b).norm() + 1e-12);
    }
}

TEST(ProxHier, InplaceMatches) {
    std::mt19937_64 gen(10);
    const HierGroupStructure s(2, 6);
    CoefVector b = random_vector(gen, 12);
    const CoefVector want = prox_hier(s, b, 0.3);
    prox_hier_inplace(s, b, 0.3);
    EXPECT_EQ(b, want);
}

TEST(ProxHier, LargeThresholdZeroes) {
    std::mt19937_64 gen(11);
    const HierGroupStructure s(2, 3);
    const CoefVector b = random_vector(gen, 6);
    // Zero is the prox output iff N*(b) <= t; the bound makes this sufficient.
    const double t = dual_norm_upper_bound(s, b);
    EXPECT_EQ(prox_hier(s, b, t * 1.0000001), CoefVector::Zero(6));
}

TEST(Suffix, LagRowDefinition) {
    const HierGroupStructure s(2, 3);
    CoefVector b(6);
    b << 1, 0, 1, 1, 0, 0;  // lag 2 zero in both series but lag 3 nonzero
    EXPECT_FALSE(zero_groups_suffix_closed(s, b));
    b << 1, 0, 0, 0, 0, 0;
    EXPECT_TRUE(zero_groups_suffix_closed(s, b));
    EXPECT_EQ(first_zero_group(s, b), 2U);
    b << 1, 0, 0, 0, 1, 0;  // a single-series zero is not a zero row
    EXPECT_TRUE(zero_groups_suffix_closed(s, b));
    EXPECT_EQ(first_zero_group(s, CoefVector::Ones(6)), 4U);
    EXPECT_EQ(first_zero_group(s, CoefVector::Zero(6)), 1U);
}
