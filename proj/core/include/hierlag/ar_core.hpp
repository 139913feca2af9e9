#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hierlag {

inline constexpr int kDefaultGridPoints = 4096;
inline constexpr int kMinGridPoints = 64;
/// Stability is decided by spectral_radius < 1 - kStabilityTolerance.
inline constexpr double kStabilityTolerance = 1e-9;

/// One univariate AR(L0) process x_t = sum_l coeffs[l-1] x_{t-l} + sigma * e_t.
class ARProcessSpec {
public:
    /// Throws InvalidArgument unless coeffs is nonempty, sigma > 0 and the
    /// last coefficient is nonzero. A single zero coefficient is accepted and
    /// denotes white noise.
    ARProcessSpec(std::vector<double> coeffs, double sigma);

    const std::vector<double>& coeffs() const noexcept { return coeffs_; }
    double sigma() const noexcept { return sigma_; }
    std::size_t lag() const noexcept { return coeffs_.size(); }

private:
    std::vector<double> coeffs_;
    double sigma_;
};

struct StabilityReport {
    double min_modulus = 0.0;  ///< min |f(z)| over the unit-circle grid
    double max_modulus = 0.0;  ///< max |f(z)| over the unit-circle grid
    double spectral_radius = 0.0;
    bool is_stable = false;
    /// min(min_modulus, 1/max_modulus) for stable processes, else 0.
    double epsilon_certified = 0.0;
};

struct SimulatedSeries {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::size_t burn_in = 0;
};

/// f(z) = 1 - sum_l coeffs[l-1] z^l (reverse characteristic polynomial).
std::complex<double> reverse_char_poly_eval(std::span<const double> coeffs, std::complex<double> z);

/// First row = coeffs, identity on the subdiagonal.
Eigen::MatrixXd companion_matrix(std::span<const double> coeffs);

/// Largest modulus among the companion eigenvalues.
double spectral_radius(std::span<const double> coeffs);

/// The grid is z_k = exp(2 pi i k / grid_points), k = 0..grid_points-1.
StabilityReport stability_report(std::span<const double> coeffs,
                                 int grid_points = kDefaultGridPoints);

/// max(10 * lag, 500).
std::size_t default_burn_in(std::size_t lag);

/// Simulates burn_in + n steps from a zero initial state and keeps the last n.
/// Throws UnstableProcess for non-stable specs.
SimulatedSeries simulate_ar(const ARProcessSpec& spec, std::size_t n, std::size_t burn_in,
                            std::uint64_t seed);

} // namespace hierlag
