#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hierlag/ar_core.hpp"
#include "hierlag/design.hpp"
#include "hierlag/hiergroup.hpp"
#include "hierlag/solver.hpp"

namespace hierlag {

/// Constants of the non-asymptotic theory.
struct TheoryConstants {
    double A = 1.0;        ///< confidence parameter, >= 1
    double delta = 0.1;    ///< confidence level, in (0, 1)
    double epsilon = 0.5;  ///< stability parameter, in (0, 1)
    /// Defaults to epsilon^4 / 216 when unset.
    std::optional<double> zeta;
    /// Hanson-Wright absolute constant. The theory never pins it down; 1/16 is
    /// a placeholder and every quantity derived from it is a configuration
    /// choice, not a result.
    double c0 = 1.0 / 16.0;
    /// Replaces 84 A e / zeta^2 in the lag-bound equation.
    std::optional<double> lag_constant_override;
    /// Replaces the whole constant in front of the rate factor in
    /// compute_lambda; keeps the D, M, L scaling of the theory value.
    std::optional<double> lambda_prefactor_override;
    /// Used verbatim as lambda when set.
    std::optional<double> lambda_override;

    double zeta_value() const;
    /// 84 A e zeta^-2, or the override.
    double lag_constant() const;
    void validate() const;
};

enum class PoolingMode { Identical, Heterogeneous, Auto };
enum class LambdaSelection { Theory, CrossValidation };
enum class CvRule { MinError, OneStandardError };
/// What is scored on held-out rows: the penalised fit itself, or a least
/// squares refit restricted to the lag order it selects.
enum class CvScore { Penalized, Refit };

const char* to_string(PoolingMode mode);
PoolingMode pooling_mode_from_string(const std::string& s);
const char* to_string(CvRule rule);
CvRule cv_rule_from_string(const std::string& s);
const char* to_string(CvScore score);
CvScore cv_score_from_string(const std::string& s);

struct CrossValidationConfig {
    std::size_t folds = 5;
    std::size_t grid_size = 20;
    double min_ratio = 1e-3;  ///< smallest grid value is min_ratio * lambda_max
    CvRule rule = CvRule::OneStandardError;
    CvScore score = CvScore::Refit;
    /// Explicit grid; when nonempty it replaces the logarithmic grid.
    std::vector<double> grid;
};

struct CrossValidationResult {
    std::vector<double> lambdas;  ///< descending
    std::vector<double> mean_error;
    std::vector<double> std_error;
    std::size_t best_index = 0;    ///< argmin of mean_error
    std::size_t chosen_index = 0;  ///< after applying the rule
    double lambda_max = 0.0;
    double chosen() const { return lambdas.at(chosen_index); }
};

struct PipelineOptions {
    PoolingMode mode = PoolingMode::Auto;
    LambdaSelection lambda_selection = LambdaSelection::CrossValidation;
    /// Explicit lag bound L; otherwise chosen by select_lag_bound.
    std::optional<std::size_t> lag_bound;
    /// Known sigma_max; otherwise estimated from a ridge pre-fit.
    std::optional<double> sigma_max;
    CrossValidationConfig cv;
    SolverConfig solver;
};

struct FitResult {
    CoefVector beta_hat;
    std::size_t num_series = 0;
    std::size_t L_input = 0;
    double lambda_used = 0.0;
    std::string lambda_source;  ///< "theory", "override" or "cross_validation"
    double sigma_max_used = 0.0;
    std::size_t L0_hat = 0;
    /// One vector of length L0_hat per series; in identical mode all equal the
    /// across-series mean.
    std::vector<std::vector<double>> beta_tilde;
    PoolingMode mode = PoolingMode::Heterogeneous;  ///< resolved, never Auto
    SolveTrace trace;
    std::vector<StabilityReport> stability;
    std::optional<CrossValidationResult> cv;
};

/// Largest L >= 1 with L (1 + C log(M L / delta)) <= n_min and L <= n_min - 1.
/// Throws LagBoundInfeasible if L = 1 already fails.
std::size_t select_lag_bound(std::size_t n_min, std::size_t M, const TheoryConstants& constants);

/// sqrt(L log(M L / delta) / (D M)).
double lambda_rate_factor(std::size_t L, std::size_t M, std::size_t D, double delta);

/// 24 (84 A e)^{1/2} zeta^-1 sigma_max^2 C#^{3/2} (1 + eps^-2 + eps^-4).
double lambda_prefactor(const TheoryConstants& constants, double sigma_max, double c_sharp);

/// T_max / T_min over the design blocks.
double c_sharp(const DesignSystem& design);

/// Theory-mode tuning parameter (prefactor times rate factor); returns the
/// override when one is set.
double compute_lambda(const DesignSystem& design, const HierGroupStructure& structure,
                      const TheoryConstants& constants, double sigma_max);

/// L^{-1/2} (2/D) ||X^T y||_inf. Any lambda at or above it yields beta_hat = 0.
double lambda_max(const DesignSystem& design);

/// sqrt of the largest per-series residual variance of a ridge (1e-6) least
/// squares pre-fit.
double estimate_sigma_max(const DesignSystem& design);

/// Blocked K-fold cross-validation of one-step-ahead squared error. Each
/// series' rows are cut into K contiguous chunks; fold k holds out chunk k of
/// every series. With CvScore::Refit the training fit at each lambda is
/// thresholded and consolidated under `mode`, and the selected lags are refit
/// by least squares (pooled in identical mode, per series otherwise).
CrossValidationResult cross_validate_lambda(const DesignSystem& design, const CrossValidationConfig& cv,
                                            const SolverConfig& solver, PoolingMode mode = PoolingMode::Auto);

/// Lag estimate and consolidated coefficients from a full solution.
struct Consolidation {
    std::size_t L0_hat = 0;
    std::vector<std::vector<double>> beta_tilde;
    PoolingMode mode = PoolingMode::Heterogeneous;
};
Consolidation consolidate(const HierGroupStructure& structure, const CoefVector& beta_hat, double lambda,
                          PoolingMode mode);

/// Auto-mode dispatch: identical iff every pair of per-series estimates is
/// within 2 lambda in the sup norm.
PoolingMode resolve_mode(const HierGroupStructure& structure, const CoefVector& beta_hat, double lambda,
                         PoolingMode requested);

/// Theory-mode pipeline: L from the lag bound, lambda from compute_lambda (or
/// the override), fit, threshold and consolidate.
FitResult run_pipeline(const MultiSeriesDataset& dataset, const TheoryConstants& constants, PoolingMode mode,
                       const SolverConfig& solver = {});

FitResult run_pipeline(const MultiSeriesDataset& dataset, const TheoryConstants& constants,
                       const PipelineOptions& options);

/// Every nonzero true coefficient has magnitude >= c_beta.
bool beta_min_check(const CoefVector& beta_true, double c_beta);

} // namespace hierlag
