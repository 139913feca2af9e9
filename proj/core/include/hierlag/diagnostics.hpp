#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hierlag/ar_core.hpp"
#include "hierlag/design.hpp"
#include "hierlag/hiergroup.hpp"
#include "hierlag/pipeline.hpp"

namespace hierlag {

struct GuaranteeReport {
    double est_error_l2 = 0.0;
    std::size_t false_discoveries = 0;
    bool true_lag_recovered = false;
    double effective_noise_surrogate = 0.0;
    double re_min_ratio = 0.0;
    double stability_fraction = 0.0;
    double prediction_mse = 0.0;
};

/// Zero-pads each series' true coefficients to length L and stacks them
/// series-major. A single vector is broadcast to all M series.
CoefVector pad_true_coefficients(const std::vector<std::vector<double>>& truth, std::size_t M, std::size_t L);

/// ||beta_hat - beta_true||_2; throws DimensionMismatch on length mismatch.
double estimation_error(const CoefVector& beta_hat, const CoefVector& beta_true);

/// |{j : |beta_hat_j| > lambda} \ supp(beta_true)|.
std::size_t false_discoveries(const CoefVector& beta_hat, const CoefVector& beta_true, double lambda);

/// (2/D) L^{-1/2} ||X^T U||_inf, an upper bound on (2/D) N*(X^T U).
double effective_noise_surrogate(const DesignSystem& design, const Eigen::VectorXd& residual_noise);

/// s = 2 floor(T zeta^2 / (8 log L)).
std::size_t re_sparsity(std::size_t T, double zeta, std::size_t L);

/// Minimum over random s-sparse unit probes v of
///   ||X_m v||^2 / [(T sigma^2 eps^2 / 2)(||v||_2^2 - (2/s)||v||_1^2)],
/// skipping probes whose bracket is not positive. Probes draw a uniform
/// support of size s and Gaussian entries. Throws DegenerateProbe if every
/// probe was skipped.
double empirical_re_ratio(const Eigen::MatrixXd& block, double sigma, double epsilon, std::size_t n_probes,
                          std::size_t sparsity, std::uint64_t seed);

/// Same ratio for explicitly supplied probes (columns of `probes`).
double re_ratio_for_probes(const Eigen::MatrixXd& block, double sigma, double epsilon, std::size_t sparsity,
                           const Eigen::MatrixXd& probes);

/// (min |f|^2, max |f|^2) over the unit-circle grid. Throws UnstableProcess.
std::pair<double, double> spectral_band(std::span<const double> coeffs, int grid_points = kDefaultGridPoints);

/// Mean over series and time of (x_t - sum_l b_l x_{t-l})^2, using the first
/// L0 values of each holdout series as presamples. One coefficient vector
/// per series, or a single vector shared by all.
double one_step_prediction_mse(const std::vector<std::vector<double>>& beta_tilde,
                               const MultiSeriesDataset& holdout);

/// Fraction of fits whose consolidated models are all stable.
double stability_census(std::span<const FitResult> fits);

/// Right-hand sides of the estimation-error and false-discovery bounds,
/// evaluated with the given constants. They are reported, not asserted.
struct TheoryBounds {
    double alpha = 0.0;  ///< min_m T_m sigma_m^2 / D
    double c_sharp = 0.0;
    double lambda = 0.0;
    double estimation_error = 0.0;
    double false_discoveries = 0.0;
    /// Sample size beyond which the prediction rate holds (uses c0).
    double prediction_min_samples = 0.0;
};

TheoryBounds theory_bounds(const DesignSystem& design, const TheoryConstants& constants,
                           std::span<const double> sigmas, std::size_t true_lag, double lambda);

} // namespace hierlag
