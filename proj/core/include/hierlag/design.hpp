#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hierlag {

/// M observed series of possibly different lengths.
struct MultiSeriesDataset {
    std::vector<std::vector<double>> series;
    std::vector<std::string> labels;

    std::size_t num_series() const noexcept { return series.size(); }
    std::size_t min_length() const;
    std::size_t max_length() const;

    /// Throws InvalidArgument if M == 0, some n_m < 2, labels are not unique
    /// or the label count does not match; EmptySeries for a zero-length series.
    void validate() const;

    /// Labels "s0", "s1", ... are generated when none are given.
    static MultiSeriesDataset from_series(std::vector<std::vector<double>> series,
                                          std::vector<std::string> labels = {});
};

/// Block-diagonal regression system y = X beta + u.
///
/// Block m holds the T_m x L lag matrix of series m; row t of the block is
/// (x_{t-1}, ..., x_{t-L}) and the matching target is x_t. The dense
/// D x (M L) matrix is never formed.
class DesignSystem {
public:
    DesignSystem(std::vector<Eigen::MatrixXd> blocks, std::vector<Eigen::VectorXd> targets);

    std::size_t num_series() const noexcept { return blocks_.size(); }
    std::size_t lag() const noexcept { return lag_; }
    std::size_t rows() const noexcept { return rows_; }  ///< D
    std::size_t cols() const noexcept { return lag_ * blocks_.size(); }  ///< M L
    std::vector<std::size_t> block_sizes() const;

    const Eigen::MatrixXd& block(std::size_t m) const { return blocks_.at(m); }
    const Eigen::VectorXd& target(std::size_t m) const { return targets_.at(m); }

    /// Stacked y of length D.
    Eigen::VectorXd y() const;
    /// X beta, length D.
    Eigen::VectorXd apply(const Eigen::VectorXd& beta) const;
    /// X^T r, length M L.
    Eigen::VectorXd apply_transpose(const Eigen::VectorXd& r) const;
    /// ||y - X beta||_2^2.
    double residual_sum_of_squares(const Eigen::VectorXd& beta) const;

    /// Dense D x (M L) copy; for tests and small diagnostics only.
    Eigen::MatrixXd dense() const;

    /// System keeping only the listed rows of each block (row indices are
    /// 0-based within the block). Every block must keep at least one row.
    DesignSystem select_rows(const std::vector<std::vector<std::size_t>>& rows_per_block) const;

private:
    std::vector<Eigen::MatrixXd> blocks_;
    std::vector<Eigen::VectorXd> targets_;
    std::size_t lag_ = 0;
    std::size_t rows_ = 0;
};

/// The first L observations of each series serve as presamples, T_m = n_m - L.
/// Throws LagTooLarge when some n_m <= L.
DesignSystem build_design(const MultiSeriesDataset& dataset, std::size_t L);

/// Lambda_max(X^T X) = max_m Lambda_max(X_m^T X_m), by power iteration on each
/// Gram block to relative residual tolerance `rel_tol`.
double gram_operator_norm(const DesignSystem& design, double rel_tol = 1e-8);

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration.
double power_iteration_max_eigenvalue(const Eigen::MatrixXd& sym, double rel_tol = 1e-8,
                                      int max_iters = 200000);

} // namespace hierlag
