#include "hierlag/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hierlag/errors.hpp"
#include "hierlag/parallel.hpp"

namespace hierlag {

double TheoryConstants::zeta_value() const {
    return zeta ? *zeta : std::pow(epsilon, 4) / 216.0;
}

double TheoryConstants::lag_constant() const {
    if (lag_constant_override) return *lag_constant_override;
    const double z = zeta_value();
    return 84.0 * A * std::numbers::e / (z * z);
}

void TheoryConstants::validate() const {
    if (!(A >= 1.0)) throw Error(Errc::InvalidArgument, "A must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::InvalidArgument, "delta must lie in (0, 1)");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::InvalidArgument, "epsilon must lie in (0, 1)");
    if (!(zeta_value() > 0.0)) throw Error(Errc::InvalidArgument, "zeta must be positive");
    if (!(c0 > 0.0)) throw Error(Errc::InvalidArgument, "c0 must be positive");
    if (lag_constant_override && !(*lag_constant_override >= 0.0)) {
        throw Error(Errc::InvalidArgument, "lag constant override must be nonnegative");
    }
    if (lambda_prefactor_override && !(*lambda_prefactor_override > 0.0)) {
        throw Error(Errc::InvalidArgument, "lambda prefactor override must be positive");
    }
    if (lambda_override && !(*lambda_override > 0.0)) {
        throw Error(Errc::InvalidArgument, "lambda override must be positive");
    }
}

const char* to_string(PoolingMode mode) {
    switch (mode) {
    case PoolingMode::Identical: return "identical";
    case PoolingMode::Heterogeneous: return "heterogeneous";
    case PoolingMode::Auto: return "auto";
    }
    return "auto";
}

PoolingMode pooling_mode_from_string(const std::string& s) {
    if (s == "identical") return PoolingMode::Identical;
    if (s == "heterogeneous") return PoolingMode::Heterogeneous;
    if (s == "auto") return PoolingMode::Auto;
    throw Error(Errc::InvalidArgument, "unknown mode '" + s + "'");
}

const char* to_string(CvRule rule) {
    return rule == CvRule::MinError ? "min" : "1se";
}

CvRule cv_rule_from_string(const std::string& s) {
    if (s == "min") return CvRule::MinError;
    if (s == "1se") return CvRule::OneStandardError;
    throw Error(Errc::InvalidArgument, "unknown CV rule '" + s + "'");
}

const char* to_string(CvScore score) {
    return score == CvScore::Refit ? "refit" : "penalized";
}

CvScore cv_score_from_string(const std::string& s) {
    if (s == "refit") return CvScore::Refit;
    if (s == "penalized") return CvScore::Penalized;
    throw Error(Errc::InvalidArgument, "unknown CV score '" + s + "'");
}

std::size_t select_lag_bound(std::size_t n_min, std::size_t M, const TheoryConstants& constants) {
    constants.validate();
    if (n_min < 2 || M < 1) throw Error(Errc::InvalidArgument, "select_lag_bound needs n_min >= 2, M >= 1");
    const double C = constants.lag_constant();
    auto feasible = [&](std::size_t L) {
        const double Ld = static_cast<double>(L);
        const double need = Ld * (1.0 + C * std::log(static_cast<double>(M) * Ld / constants.delta));
        return need <= static_cast<double>(n_min);
    };
    if (!feasible(1)) {
        throw Error(Errc::LagBoundInfeasible,
                    "no lag bound L >= 1 satisfies the sample-size equation for n_min = " +
                        std::to_string(n_min) + "; override the lag constant or set L explicitly");
    }
    // The left-hand side increases with L, so binary-search the last feasible L.
    std::size_t lo = 1;
    std::size_t hi = n_min - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (feasible(mid)) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

double lambda_rate_factor(std::size_t L, std::size_t M, std::size_t D, double delta) {
    const double Ld = static_cast<double>(L);
    const double Md = static_cast<double>(M);
    return std::sqrt(Ld * std::log(Md * Ld / delta) / (static_cast<double>(D) * Md));
}

double lambda_prefactor(const TheoryConstants& constants, double sigma_max, double c_sharp) {
    const double e2 = 1.0 / (constants.epsilon * constants.epsilon);
    const double eps_factor = 1.0 + e2 + e2 * e2;
    return 24.0 * std::sqrt(84.0 * constants.A * std::numbers::e) / constants.zeta_value() * sigma_max *
           sigma_max * std::pow(c_sharp, 1.5) * eps_factor;
}

double c_sharp(const DesignSystem& design) {
    const auto sizes = design.block_sizes();
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    return static_cast<double>(*hi) / static_cast<double>(*lo);
}

double compute_lambda(const DesignSystem& design, const HierGroupStructure& structure,
                      const TheoryConstants& constants, double sigma_max) {
    constants.validate();
    if (constants.lambda_override) return *constants.lambda_override;
    if (!(sigma_max > 0.0)) throw Error(Errc::InvalidArgument, "sigma_max must be positive");
    if (design.num_series() != structure.num_series() || design.lag() != structure.lag()) {
        throw Error(Errc::DimensionMismatch, "design and group structure disagree on M or L");
    }
    const double prefactor = constants.lambda_prefactor_override
                                 ? *constants.lambda_prefactor_override
                                 : lambda_prefactor(constants, sigma_max, c_sharp(design));
    return prefactor * lambda_rate_factor(design.lag(), design.num_series(), design.rows(), constants.delta);
}

double lambda_max(const DesignSystem& design) {
    const Eigen::VectorXd xty = design.apply_transpose(design.y());
    return 2.0 / static_cast<double>(design.rows()) * xty.cwiseAbs().maxCoeff() /
           std::sqrt(static_cast<double>(design.lag()));
}

double estimate_sigma_max(const DesignSystem& design) {
    constexpr double kRidge = 1e-6;
    double worst = 0.0;
    for (std::size_t m = 0; m < design.num_series(); ++m) {
        const auto& x = design.block(m);
        const auto& y = design.target(m);
        Eigen::MatrixXd gram = x.transpose() * x;
        gram.diagonal().array() += kRidge;
        const Eigen::VectorXd b = gram.ldlt().solve(x.transpose() * y);
        worst = std::max(worst, (y - x * b).squaredNorm() / static_cast<double>(y.size()));
    }
    return std::sqrt(worst);
}

namespace {

std::vector<double> log_grid(double top, double min_ratio, std::size_t size) {
    std::vector<double> grid(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double frac = size == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(size - 1);
        grid[i] = top * std::pow(min_ratio, frac);
    }
    return grid;
}

/// Least squares on the first L0 columns of every block; one shared vector in
/// identical mode, one per series otherwise. Returned in the series-major
/// layout with zeros past L0.
CoefVector refit_lags(const DesignSystem& design, std::size_t L0, PoolingMode mode) {
    const auto L = static_cast<Eigen::Index>(design.lag());
    const auto k = static_cast<Eigen::Index>(L0);
    const std::size_t M = design.num_series();
    CoefVector beta = CoefVector::Zero(static_cast<Eigen::Index>(M) * L);
    if (L0 == 0) return beta;
    auto solve = [k](const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
            // Rank deficient: a tiny ridge keeps the refit defined.
            const double ridge = 1e-10 * std::max(1.0, gram.diagonal().maxCoeff());
            Eigen::MatrixXd g = gram;
            g.diagonal().array() += ridge;
            return g.ldlt().solve(rhs);
        }
        return ldlt.solve(rhs);
    };
    if (mode == PoolingMode::Identical) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
        for (std::size_t m = 0; m < M; ++m) {
            const auto x = design.block(m).leftCols(k);
            gram.noalias() += x.transpose() * x;
            rhs.noalias() += x.transpose() * design.target(m);
        }
        const Eigen::VectorXd shared = solve(gram, rhs);
        for (std::size_t m = 0; m < M; ++m) beta.segment(static_cast<Eigen::Index>(m) * L, k) = shared;
    } else {
        for (std::size_t m = 0; m < M; ++m) {
            const auto x = design.block(m).leftCols(k);
            beta.segment(static_cast<Eigen::Index>(m) * L, k) =
                solve(x.transpose() * x, x.transpose() * design.target(m));
        }
    }
    return beta;
}

} // namespace

CrossValidationResult cross_validate_lambda(const DesignSystem& design, const CrossValidationConfig& cv,
                                            const SolverConfig& solver, PoolingMode mode) {
    if (cv.folds < 2) throw Error(Errc::InvalidArgument, "cross-validation needs at least 2 folds");
    const auto sizes = design.block_sizes();
    for (std::size_t T : sizes) {
        if (T < cv.folds) {
            throw Error(Errc::InvalidArgument, "every series needs at least `folds` post-samples for CV");
        }
    }

    CrossValidationResult out;
    out.lambda_max = lambda_max(design);
    if (!cv.grid.empty()) {
        out.lambdas = cv.grid;
        std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<>());
    } else {
        if (!(cv.min_ratio > 0.0 && cv.min_ratio < 1.0) || cv.grid_size < 1) {
            throw Error(Errc::InvalidArgument, "CV grid needs min_ratio in (0, 1) and grid_size >= 1");
        }
        out.lambdas = log_grid(out.lambda_max, cv.min_ratio, cv.grid_size);
    }
    const std::size_t G = out.lambdas.size();
    const std::size_t K = cv.folds;
    const HierGroupStructure structure(design.num_series(), design.lag());
    const auto L = static_cast<Eigen::Index>(design.lag());

    // fold_sse[k][g]: held-out squared error of fold k at grid point g.
    std::vector<std::vector<double>> fold_sse(K, std::vector<double>(G, 0.0));
    std::vector<double> fold_rows(K, 0.0);

    parallel_for(K, [&](std::size_t k) {
        std::vector<std::vector<std::size_t>> train(design.num_series());
        std::vector<std::pair<std::size_t, std::size_t>> held(design.num_series());
        double rows = 0.0;
        for (std::size_t m = 0; m < design.num_series(); ++m) {
            const std::size_t T = sizes[m];
            const std::size_t begin = k * T / K;
            const std::size_t end = (k + 1) * T / K;
            held[m] = {begin, end};
            rows += static_cast<double>(end - begin);
            for (std::size_t r = 0; r < T; ++r) {
                if (r < begin || r >= end) train[m].push_back(r);
            }
        }
        fold_rows[k] = rows;
        const DesignSystem train_design = design.select_rows(train);
        CoefVector warm = CoefVector::Zero(static_cast<Eigen::Index>(structure.dim()));
        for (std::size_t g = 0; g < G; ++g) {
            const SolveResult sol = fit(train_design, structure, out.lambdas[g], solver, &warm);
            warm = sol.beta;
            CoefVector scored = sol.beta;
            if (cv.score == CvScore::Refit) {
                const Consolidation c = consolidate(structure, sol.beta, out.lambdas[g], mode);
                scored = refit_lags(train_design, c.L0_hat, c.mode);
            }
            double sse = 0.0;
            for (std::size_t m = 0; m < design.num_series(); ++m) {
                const auto [begin, end] = held[m];
                if (end == begin) continue;
                const auto len = static_cast<Eigen::Index>(end - begin);
                const auto b = static_cast<Eigen::Index>(begin);
                const Eigen::VectorXd resid =
                    design.target(m).segment(b, len) -
                    design.block(m).middleRows(b, len) * scored.segment(static_cast<Eigen::Index>(m) * L, L);
                sse += resid.squaredNorm();
            }
            fold_sse[k][g] = sse;
        }
    });

    out.mean_error.assign(G, 0.0);
    out.std_error.assign(G, 0.0);
    const double total_rows = static_cast<double>(design.rows());
    for (std::size_t g = 0; g < G; ++g) {
        double sum_sse = 0.0;
        std::vector<double> fold_mse(K);
        for (std::size_t k = 0; k < K; ++k) {
            sum_sse += fold_sse[k][g];
            fold_mse[k] = fold_rows[k] > 0.0 ? fold_sse[k][g] / fold_rows[k] : 0.0;
        }
        out.mean_error[g] = sum_sse / total_rows;
        double mean = 0.0;
        for (double v : fold_mse) mean += v;
        mean /= static_cast<double>(K);
        double var = 0.0;
        for (double v : fold_mse) var += (v - mean) * (v - mean);
        var /= static_cast<double>(K - 1);
        out.std_error[g] = std::sqrt(var / static_cast<double>(K));
    }
    out.best_index = static_cast<std::size_t>(
        std::min_element(out.mean_error.begin(), out.mean_error.end()) - out.mean_error.begin());
    out.chosen_index = out.best_index;
    if (cv.rule == CvRule::OneStandardError) {
        // Lambdas are descending: the first index within one SE is the largest.
        const double cutoff = out.mean_error[out.best_index] + out.std_error[out.best_index];
        for (std::size_t g = 0; g <= out.best_index; ++g) {
            if (out.mean_error[g] <= cutoff) {
                out.chosen_index = g;
                break;
            }
        }
    }
    return out;
}

PoolingMode resolve_mode(const HierGroupStructure& structure, const CoefVector& beta_hat, double lambda,
                         PoolingMode requested) {
    if (requested != PoolingMode::Auto) return requested;
    const auto mat = structure.as_matrix(beta_hat);
    double spread = 0.0;
    for (Eigen::Index j = 0; j < mat.rows(); ++j) {
        spread = std::max(spread, mat.row(j).maxCoeff() - mat.row(j).minCoeff());
    }
    return spread <= 2.0 * lambda ? PoolingMode::Identical : PoolingMode::Heterogeneous;
}

Consolidation consolidate(const HierGroupStructure& structure, const CoefVector& beta_hat, double lambda,
                          PoolingMode mode) {
    Consolidation out;
    out.mode = resolve_mode(structure, beta_hat, lambda, mode);
    const auto mat = structure.as_matrix(beta_hat);
    const std::size_t M = structure.num_series();
    const std::size_t L = structure.lag();

    // Strict inequality: |b| == lambda is not a discovery.
    for (std::size_t j = L; j >= 1; --j) {
        const auto row = static_cast<Eigen::Index>(j - 1);
        const bool hit = out.mode == PoolingMode::Identical
                             ? std::abs(mat(row, 0)) > lambda
                             : (mat.row(row).array().abs() > lambda).any();
        if (hit) {
            out.L0_hat = j;
            break;
        }
    }

    const auto L0 = static_cast<Eigen::Index>(out.L0_hat);
    out.beta_tilde.assign(M, std::vector<double>(out.L0_hat, 0.0));
    if (out.mode == PoolingMode::Identical) {
        std::vector<double> mean(out.L0_hat, 0.0);
        for (Eigen::Index j = 0; j < L0; ++j) {
            mean[static_cast<std::size_t>(j)] = mat.row(j).mean();
        }
        for (auto& b : out.beta_tilde) b = mean;
    } else {
        for (std::size_t m = 0; m < M; ++m) {
            for (Eigen::Index j = 0; j < L0; ++j) {
                out.beta_tilde[m][static_cast<std::size_t>(j)] = mat(j, static_cast<Eigen::Index>(m));
            }
        }
    }
    return out;
}

FitResult run_pipeline(const MultiSeriesDataset& dataset, const TheoryConstants& constants, PoolingMode mode,
                       const SolverConfig& solver) {
    PipelineOptions options;
    options.mode = mode;
    options.lambda_selection = LambdaSelection::Theory;
    options.solver = solver;
    return run_pipeline(dataset, constants, options);
}

FitResult run_pipeline(const MultiSeriesDataset& dataset, const TheoryConstants& constants,
                       const PipelineOptions& options) {
    dataset.validate();
    constants.validate();
    options.solver.validate();

    const std::size_t M = dataset.num_series();
    const std::size_t L = options.lag_bound ? *options.lag_bound
                                            : select_lag_bound(dataset.min_length(), M, constants);
    const DesignSystem design = build_design(dataset, L);
    const HierGroupStructure structure(M, L);

    FitResult result;
    result.num_series = M;
    result.L_input = L;
    result.sigma_max_used = options.sigma_max ? *options.sigma_max : estimate_sigma_max(design);

    if (constants.lambda_override) {
        result.lambda_used = *constants.lambda_override;
        result.lambda_source = "override";
    } else if (options.lambda_selection == LambdaSelection::Theory) {
        result.lambda_used = compute_lambda(design, structure, constants, result.sigma_max_used);
        result.lambda_source = "theory";
    } else {
        result.cv = cross_validate_lambda(design, options.cv, options.solver, options.mode);
        result.lambda_used = result.cv->chosen();
        result.lambda_source = "cross_validation";
    }

    SolveResult sol = fit(design, structure, result.lambda_used, options.solver);
    result.beta_hat = std::move(sol.beta);
    result.trace = std::move(sol.trace);

    Consolidation c = consolidate(structure, result.beta_hat, result.lambda_used, options.mode);
    result.L0_hat = c.L0_hat;
    result.beta_tilde = std::move(c.beta_tilde);
    result.mode = c.mode;
    result.stability.reserve(M);
    for (const auto& b : result.beta_tilde) {
        // An empty model is f(z) = 1.
        const std::vector<double> coeffs = b.empty() ? std::vector<double>{0.0} : b;
        result.stability.push_back(stability_report(coeffs));
    }
    return result;
}

bool beta_min_check(const CoefVector& beta_true, double c_beta) {
    for (Eigen::Index i = 0; i < beta_true.size(); ++i) {
        if (beta_true(i) != 0.0 && std::abs(beta_true(i)) < c_beta) return false;
    }
    return true;
}

} // namespace hierlag
