#include "hierlag/ar_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hierlag/errors.hpp"
#include "hierlag/rng.hpp"

namespace hierlag {

ARProcessSpec::ARProcessSpec(std::vector<double> coeffs, double sigma)
    : coeffs_(std::move(coeffs)), sigma_(sigma) {
    if (coeffs_.empty()) {
        throw Error(Errc::InvalidArgument, "AR process needs at least one coefficient");
    }
    for (double c : coeffs_) {
        if (!std::isfinite(c)) {
            throw Error(Errc::NonFiniteCoefficient, "AR coefficient is not finite");
        }
    }
    if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
        throw Error(Errc::InvalidArgument, "innovation sigma must be positive and finite");
    }
    if (coeffs_.size() > 1 && coeffs_.back() == 0.0) {
        throw Error(Errc::InvalidArgument, "declared lag exceeds the true lag (trailing zero coefficient)");
    }
}

std::complex<double> reverse_char_poly_eval(std::span<const double> coeffs, std::complex<double> z) {
    // Horner on sum_l c_l z^l = z (c_1 + z (c_2 + ...)).
    std::complex<double> acc(0.0, 0.0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = (acc + *it) * z;
    }
    return 1.0 - acc;
}

Eigen::MatrixXd companion_matrix(std::span<const double> coeffs) {
    const auto p = static_cast<Eigen::Index>(coeffs.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        a(0, j) = coeffs[static_cast<std::size_t>(j)];
    }
    for (Eigen::Index i = 1; i < p; ++i) {
        a(i, i - 1) = 1.0;
    }
    return a;
}

double spectral_radius(std::span<const double> coeffs) {
    if (coeffs.size() == 1) {
        return std::abs(coeffs[0]);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion_matrix(coeffs), /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw Error(Errc::InvalidArgument, "companion eigenvalue computation failed");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

StabilityReport stability_report(std::span<const double> coeffs, int grid_points) {
    if (coeffs.empty()) {
        throw Error(Errc::InvalidArgument, "stability_report needs a nonempty coefficient vector");
    }
    if (grid_points < kMinGridPoints) {
        throw Error(Errc::InvalidArgument, "grid_points must be >= 64");
    }
    for (double c : coeffs) {
        if (!std::isfinite(c)) {
            throw Error(Errc::NonFiniteCoefficient, "coefficient is not finite");
        }
    }

    StabilityReport report;
    report.min_modulus = std::numeric_limits<double>::infinity();
    report.max_modulus = 0.0;
    const double step = 2.0 * std::numbers::pi / grid_points;
    for (int k = 0; k < grid_points; ++k) {
        const double modulus = std::abs(reverse_char_poly_eval(coeffs, std::polar(1.0, step * k)));
        report.min_modulus = std::min(report.min_modulus, modulus);
        report.max_modulus = std::max(report.max_modulus, modulus);
    }
    report.spectral_radius = spectral_radius(coeffs);
    report.is_stable = report.spectral_radius < 1.0 - kStabilityTolerance;
    report.epsilon_certified =
        report.is_stable ? std::min(report.min_modulus, 1.0 / report.max_modulus) : 0.0;
    return report;
}

std::size_t default_burn_in(std::size_t lag) { return std::max<std::size_t>(10 * lag, 500); }

SimulatedSeries simulate_ar(const ARProcessSpec& spec, std::size_t n, std::size_t burn_in,
                            std::uint64_t seed) {
    const auto& coeffs = spec.coeffs();
    if (!(spectral_radius(coeffs) < 1.0 - kStabilityTolerance)) {
        throw Error(Errc::UnstableProcess, "refusing to simulate a non-stable AR process");
    }
    const std::size_t lag = coeffs.size();
    const std::size_t total = burn_in + n;

    Rng rng(seed);
    // Leading `lag` zeros are the initial state.
    std::vector<double> path(total + lag, 0.0);
    for (std::size_t t = lag; t < path.size(); ++t) {
        double x = spec.sigma() * rng.normal();
        for (std::size_t l = 1; l <= lag; ++l) {
            x += coeffs[l - 1] * path[t - l];
        }
        path[t] = x;
    }

    SimulatedSeries out;
    out.values.assign(path.end() - static_cast<std::ptrdiff_t>(n), path.end());
    out.seed = seed;
    out.burn_in = burn_in;
    return out;
}

} // namespace hierlag
