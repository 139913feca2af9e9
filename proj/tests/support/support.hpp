#pragma once

#include <atomic>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hierlag/ar_core.hpp"
#include "hierlag/design.hpp"
#include "hierlag/hiergroup.hpp"
#include "hierlag/solver.hpp"

namespace testing_support {

struct FitAudit {
    std::atomic<long> fits{0};
    std::atomic<long> violations{0};
};

/// Process-wide counters fed by audited(); checked once after all tests.
FitAudit& audit();

/// Copy of `config` whose observer records every returned solution and
/// counts hierarchical-sparsity violations.
hierlag::SolverConfig audited(hierlag::SolverConfig config = {});

inline Eigen::VectorXd random_vector(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = g(gen);
    return v;
}

/// M series of the given lengths from a fixed stable AR(2).
inline hierlag::MultiSeriesDataset ar2_dataset(const std::vector<std::size_t>& lengths, std::uint64_t seed,
                                               std::vector<double> coeffs = {0.5, -0.3}) {
    std::vector<std::vector<double>> series;
    const hierlag::ARProcessSpec spec(coeffs, 1.0);
    for (std::size_t m = 0; m < lengths.size(); ++m) {
        series.push_back(hierlag::simulate_ar(spec, lengths[m], 500, seed * 131 + m).values);
    }
    return hierlag::MultiSeriesDataset::from_series(std::move(series));
}

/// Random block-diagonal system with Gaussian entries.
inline hierlag::DesignSystem random_design(std::mt19937_64& gen, std::size_t M, std::size_t L,
                                           std::size_t T_lo, std::size_t T_hi) {
    std::uniform_int_distribution<std::size_t> pick(T_lo, T_hi);
    std::normal_distribution<double> g;
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<Eigen::VectorXd> targets;
    for (std::size_t m = 0; m < M; ++m) {
        const auto T = static_cast<Eigen::Index>(pick(gen));
        Eigen::MatrixXd b(T, static_cast<Eigen::Index>(L));
        for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(gen);
        Eigen::VectorXd y(T);
        for (Eigen::Index i = 0; i < T; ++i) y(i) = g(gen);
        blocks.push_back(std::move(b));
        targets.push_back(std::move(y));
    }
    return hierlag::DesignSystem(std::move(blocks), std::move(targets));
}

} // namespace testing_support
