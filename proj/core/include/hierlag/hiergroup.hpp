#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace hierlag {

/// Coefficients stacked series-major: (b^1_1..b^1_L, b^2_1..b^2_L, ...).
using CoefVector = Eigen::VectorXd;

/// Nested lag groups G_l = {1..M} x {l..L}, l = 1..L, with G_1 > G_2 > ... > G_L.
///
/// Group l carries the weight sqrt(|G_l|) = sqrt(M (L - l + 1)). Group indices
/// in this interface are 1-based to match lag indices.
class HierGroupStructure {
public:
    HierGroupStructure(std::size_t num_series, std::size_t lag);

    std::size_t num_series() const noexcept { return M_; }
    std::size_t lag() const noexcept { return L_; }
    std::size_t dim() const noexcept { return M_ * L_; }

    std::size_t group_size(std::size_t l) const;
    double weight(std::size_t l) const;
    const std::vector<double>& weights() const noexcept { return weights_; }

    /// Flat index of coefficient (series m, lag j); both 0-based here.
    std::size_t index(std::size_t m, std::size_t j) const noexcept { return m * L_ + j; }

    /// L x M view, column m = series m, row j = lag j+1.
    Eigen::Map<const Eigen::MatrixXd> as_matrix(const CoefVector& beta) const;
    Eigen::Map<Eigen::MatrixXd> as_matrix(CoefVector& beta) const;

    /// Throws DimensionMismatch when beta.size() != M L.
    void check(const CoefVector& beta) const;

private:
    std::size_t M_;
    std::size_t L_;
    std::vector<double> weights_;
};

/// Frobenius norm of the G_l block (all series, lags l..L).
double group_block_norm(const HierGroupStructure& structure, const CoefVector& beta, std::size_t l);

/// N(beta) = sum_l sqrt(M (L-l+1)) ||beta_{G_l}||_F.
double group_norm(const HierGroupStructure& structure, const CoefVector& beta);

/// L^{-1/2} ||alpha||_inf, an upper bound on the dual norm N*(alpha).
double dual_norm_upper_bound(const HierGroupStructure& structure, const CoefVector& alpha);

/// Group soft-thresholding of G_l at level threshold * sqrt(|G_l|). A block
/// whose norm is at or below the level is set to zero.
CoefVector prox_single_group(const HierGroupStructure& structure, const CoefVector& beta,
                             std::size_t l, double threshold);

/// Prox of threshold * N: single-group proxes applied from G_L up to G_1.
CoefVector prox_hier(const HierGroupStructure& structure, const CoefVector& beta, double threshold);

/// In-place form of prox_hier; no allocation.
void prox_hier_inplace(const HierGroupStructure& structure, CoefVector& beta, double threshold);

/// Smallest l such that G_l is entirely zero, or L + 1 if none is.
std::size_t first_zero_group(const HierGroupStructure& structure, const CoefVector& beta);

/// Hierarchical sparsity: a lag that is zero in every series is followed only
/// by zero lags, i.e. the zero rows are exactly G_{l0} for some l0.
bool zero_groups_suffix_closed(const HierGroupStructure& structure, const CoefVector& beta);

} // namespace hierlag
