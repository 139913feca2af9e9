#include "hierlag/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hierlag/errors.hpp"
#include "hierlag/rng.hpp"

namespace hierlag {

CoefVector pad_true_coefficients(const std::vector<std::vector<double>>& truth, std::size_t M, std::size_t L) {
    if (truth.size() != 1 && truth.size() != M) {
        throw Error(Errc::DimensionMismatch, "truth needs one coefficient vector or one per series");
    }
    CoefVector out = CoefVector::Zero(static_cast<Eigen::Index>(M * L));
    for (std::size_t m = 0; m < M; ++m) {
        const auto& c = truth.size() == 1 ? truth.front() : truth[m];
        if (c.size() > L) {
            throw Error(Errc::DimensionMismatch, "true lag exceeds the fitted lag bound");
        }
        for (std::size_t j = 0; j < c.size(); ++j) out(static_cast<Eigen::Index>(m * L + j)) = c[j];
    }
    return out;
}

double estimation_error(const CoefVector& beta_hat, const CoefVector& beta_true) {
    if (beta_hat.size() != beta_true.size()) {
        throw Error(Errc::DimensionMismatch, "estimate and truth have different lengths");
    }
    return (beta_hat - beta_true).norm();
}

std::size_t false_discoveries(const CoefVector& beta_hat, const CoefVector& beta_true, double lambda) {
    if (beta_hat.size() != beta_true.size()) {
        throw Error(Errc::DimensionMismatch, "estimate and truth have different lengths");
    }
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < beta_hat.size(); ++i) {
        if (std::abs(beta_hat(i)) > lambda && beta_true(i) == 0.0) ++count;
    }
    return count;
}

double effective_noise_surrogate(const DesignSystem& design, const Eigen::VectorXd& residual_noise) {
    if (static_cast<std::size_t>(residual_noise.size()) != design.rows()) {
        throw Error(Errc::DimensionMismatch, "noise vector length must equal D");
    }
    const Eigen::VectorXd xtu = design.apply_transpose(residual_noise);
    return 2.0 / static_cast<double>(design.rows()) * xtu.cwiseAbs().maxCoeff() /
           std::sqrt(static_cast<double>(design.lag()));
}

std::size_t re_sparsity(std::size_t T, double zeta, std::size_t L) {
    if (L < 2) throw Error(Errc::InvalidArgument, "sparsity formula needs L >= 2 (log L > 0)");
    const double v = static_cast<double>(T) * zeta * zeta / (8.0 * std::log(static_cast<double>(L)));
    return 2 * static_cast<std::size_t>(std::floor(v));
}

double re_ratio_for_probes(const Eigen::MatrixXd& block, double sigma, double epsilon, std::size_t sparsity,
                           const Eigen::MatrixXd& probes) {
    const double T = static_cast<double>(block.rows());
    const double scale = T * sigma * sigma * epsilon * epsilon / 2.0;
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (Eigen::Index p = 0; p < probes.cols(); ++p) {
        const Eigen::VectorXd v = probes.col(p);
        const double l1 = v.lpNorm<1>();
        const double bracket = v.squaredNorm() - 2.0 / static_cast<double>(sparsity) * l1 * l1;
        if (!(bracket > 0.0)) continue;
        any = true;
        best = std::min(best, (block * v).squaredNorm() / (scale * bracket));
    }
    if (!any) throw Error(Errc::DegenerateProbe, "every restricted-eigenvalue probe had a nonpositive bracket");
    return best;
}

double empirical_re_ratio(const Eigen::MatrixXd& block, double sigma, double epsilon, std::size_t n_probes,
                          std::size_t sparsity, std::uint64_t seed) {
    const auto L = static_cast<std::size_t>(block.cols());
    if (n_probes < 1) throw Error(Errc::InvalidArgument, "need at least one probe");
    if (sparsity < 1 || sparsity > L) throw Error(Errc::InvalidArgument, "sparsity must lie in [1, L]");
    if (!(sigma > 0.0) || !(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "sigma, epsilon must be positive");

    Rng rng(seed);
    Eigen::MatrixXd probes = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(n_probes));
    std::vector<std::size_t> perm(L);
    for (std::size_t p = 0; p < n_probes; ++p) {
        for (std::size_t i = 0; i < L; ++i) perm[i] = i;
        // Partial Fisher-Yates: the first `sparsity` slots form a uniform support.
        for (std::size_t i = 0; i < sparsity; ++i) {
            std::swap(perm[i], perm[i + rng.uniform_index(L - i)]);
        }
        auto col = probes.col(static_cast<Eigen::Index>(p));
        for (std::size_t i = 0; i < sparsity; ++i) col(static_cast<Eigen::Index>(perm[i])) = rng.normal();
        const double nrm = col.norm();
        if (nrm > 0.0) col /= nrm;
    }
    return re_ratio_for_probes(block, sigma, epsilon, sparsity, probes);
}

std::pair<double, double> spectral_band(std::span<const double> coeffs, int grid_points) {
    const StabilityReport r = stability_report(coeffs, grid_points);
    if (!r.is_stable) throw Error(Errc::UnstableProcess, "spectral band requires a stable process");
    return {r.min_modulus * r.min_modulus, r.max_modulus * r.max_modulus};
}

double one_step_prediction_mse(const std::vector<std::vector<double>>& beta_tilde,
                               const MultiSeriesDataset& holdout) {
    const std::size_t M = holdout.num_series();
    if (beta_tilde.empty() || (beta_tilde.size() != 1 && beta_tilde.size() != M)) {
        throw Error(Errc::DimensionMismatch, "need one coefficient vector or one per holdout series");
    }
    double sse = 0.0;
    std::size_t count = 0;
    for (std::size_t m = 0; m < M; ++m) {
        const auto& b = beta_tilde.size() == 1 ? beta_tilde.front() : beta_tilde[m];
        const auto& x = holdout.series[m];
        const std::size_t L0 = b.size();
        if (x.size() <= L0) throw LagTooLarge(m, x.size(), L0);
        for (std::size_t t = L0; t < x.size(); ++t) {
            double pred = 0.0;
            for (std::size_t l = 1; l <= L0; ++l) pred += b[l - 1] * x[t - l];
            const double e = x[t] - pred;
            sse += e * e;
            ++count;
        }
    }
    return sse / static_cast<double>(count);
}

double stability_census(std::span<const FitResult> fits) {
    if (fits.empty()) throw Error(Errc::InvalidArgument, "stability census needs at least one fit");
    std::size_t stable = 0;
    for (const auto& f : fits) {
        const bool ok = std::all_of(f.stability.begin(), f.stability.end(),
                                    [](const StabilityReport& r) { return r.is_stable; });
        if (ok) ++stable;
    }
    return static_cast<double>(stable) / static_cast<double>(fits.size());
}

TheoryBounds theory_bounds(const DesignSystem& design, const TheoryConstants& constants,
                           std::span<const double> sigmas, std::size_t true_lag, double lambda) {
    constants.validate();
    if (sigmas.size() != design.num_series()) {
        throw Error(Errc::DimensionMismatch, "need one innovation sigma per series");
    }
    const auto sizes = design.block_sizes();
    const double D = static_cast<double>(design.rows());
    const double M = static_cast<double>(design.num_series());
    const double L = static_cast<double>(design.lag());
    const double L0 = static_cast<double>(true_lag);
    double alpha = std::numeric_limits<double>::infinity();
    double sigma_max = 0.0;
    for (std::size_t m = 0; m < sizes.size(); ++m) {
        alpha = std::min(alpha, static_cast<double>(sizes[m]) * sigmas[m] * sigmas[m] / D);
        sigma_max = std::max(sigma_max, sigmas[m]);
    }
    const double eps = constants.epsilon;
    const double e2 = 1.0 / (eps * eps);
    const double eps_factor = 1.0 + e2 + e2 * e2;
    const double zeta = constants.zeta_value();
    const double cs = c_sharp(design);
    const double root = std::sqrt(84.0 * constants.A * std::numbers::e);
    const double log_term = std::log(M * L / constants.delta);
    const double common = root * sigma_max * sigma_max * std::pow(cs, 1.5) * eps_factor /
                          (zeta * alpha * eps * eps) * std::sqrt(log_term / D);

    TheoryBounds b;
    b.alpha = alpha;
    b.c_sharp = cs;
    b.lambda = lambda;
    b.estimation_error = 81.0 * L * L0 * common;
    b.false_discoveries = 243.0 * L * std::pow(L0, 1.5) * common / lambda;
    const double eta = 8.0 * root / zeta * eps_factor * std::pow(cs, 1.5) * sigma_max * sigma_max *
                       std::sqrt(L * log_term / (D * M));
    b.prediction_min_samples = 8.0 * sigma_max * sigma_max * eps_factor / (constants.c0 * eta) * log_term;
    return b;
}

} // namespace hierlag
