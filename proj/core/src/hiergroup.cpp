#include "hierlag/hiergroup.hpp"

#include <algorithm>
#include <cmath>

#include "hierlag/errors.hpp"

namespace hierlag {

HierGroupStructure::HierGroupStructure(std::size_t num_series, std::size_t lag)
    : M_(num_series), L_(lag) {
    if (M_ == 0 || L_ == 0) {
        throw Error(Errc::InvalidArgument, "group structure needs M >= 1 and L >= 1");
    }
    weights_.reserve(L_);
    for (std::size_t l = 1; l <= L_; ++l) {
        weights_.push_back(std::sqrt(static_cast<double>(M_ * (L_ - l + 1))));
    }
}

std::size_t HierGroupStructure::group_size(std::size_t l) const {
    if (l < 1 || l > L_) throw Error(Errc::InvalidArgument, "group index out of range");
    return M_ * (L_ - l + 1);
}

double HierGroupStructure::weight(std::size_t l) const {
    if (l < 1 || l > L_) throw Error(Errc::InvalidArgument, "group index out of range");
    return weights_[l - 1];
}

Eigen::Map<const Eigen::MatrixXd> HierGroupStructure::as_matrix(const CoefVector& beta) const {
    check(beta);
    return {beta.data(), static_cast<Eigen::Index>(L_), static_cast<Eigen::Index>(M_)};
}

Eigen::Map<Eigen::MatrixXd> HierGroupStructure::as_matrix(CoefVector& beta) const {
    check(beta);
    return {beta.data(), static_cast<Eigen::Index>(L_), static_cast<Eigen::Index>(M_)};
}

void HierGroupStructure::check(const CoefVector& beta) const {
    if (static_cast<std::size_t>(beta.size()) != M_ * L_) {
        throw Error(Errc::DimensionMismatch, "coefficient vector length " + std::to_string(beta.size()) +
                                                 " != M*L = " + std::to_string(M_ * L_));
    }
}

double group_block_norm(const HierGroupStructure& structure, const CoefVector& beta, std::size_t l) {
    const auto mat = structure.as_matrix(beta);
    const auto depth = static_cast<Eigen::Index>(structure.lag() - l + 1);
    return mat.bottomRows(depth).norm();
}

double group_norm(const HierGroupStructure& structure, const CoefVector& beta) {
    const auto mat = structure.as_matrix(beta);
    const std::size_t L = structure.lag();
    // Accumulate squared row norms from the deepest lag so each suffix costs O(M).
    double suffix_sq = 0.0;
    double total = 0.0;
    for (std::size_t l = L; l >= 1; --l) {
        suffix_sq += mat.row(static_cast<Eigen::Index>(l - 1)).squaredNorm();
        total += structure.weight(l) * std::sqrt(suffix_sq);
    }
    return total;
}

double dual_norm_upper_bound(const HierGroupStructure& structure, const CoefVector& alpha) {
    structure.check(alpha);
    if (alpha.size() == 0) return 0.0;
    return alpha.cwiseAbs().maxCoeff() / std::sqrt(static_cast<double>(structure.lag()));
}

CoefVector prox_single_group(const HierGroupStructure& structure, const CoefVector& beta,
                             std::size_t l, double threshold) {
    if (threshold < 0.0) throw Error(Errc::InvalidArgument, "threshold must be nonnegative");
    CoefVector out = beta;
    auto mat = structure.as_matrix(out);
    const auto depth = static_cast<Eigen::Index>(structure.lag() - l + 1);
    auto block = mat.bottomRows(depth);
    const double r = block.norm();
    const double level = threshold * structure.weight(l);
    if (r <= level) {
        block.setZero();
    } else {
        block *= 1.0 - level / r;
    }
    return out;
}

void prox_hier_inplace(const HierGroupStructure& structure, CoefVector& beta, double threshold) {
    if (threshold < 0.0) throw Error(Errc::InvalidArgument, "threshold must be nonnegative");
    if (threshold == 0.0) {
        structure.check(beta);
        return;
    }
    auto mat = structure.as_matrix(beta);
    const std::size_t L = structure.lag();
    // Track the squared norm of the current suffix block incrementally. After a
    // group is rescaled by s, every deeper row was rescaled too, so the running
    // sum scales by s^2.
    double suffix_sq = 0.0;
    for (std::size_t l = L; l >= 1; --l) {
        const auto row = static_cast<Eigen::Index>(l - 1);
        suffix_sq += mat.row(row).squaredNorm();
        const double r = std::sqrt(suffix_sq);
        const double level = threshold * structure.weight(l);
        if (r <= level) {
            mat.bottomRows(static_cast<Eigen::Index>(L - l + 1)).setZero();
            suffix_sq = 0.0;
        } else {
            const double scale = 1.0 - level / r;
            mat.bottomRows(static_cast<Eigen::Index>(L - l + 1)) *= scale;
            suffix_sq *= scale * scale;
        }
    }
}

CoefVector prox_hier(const HierGroupStructure& structure, const CoefVector& beta, double threshold) {
    CoefVector out = beta;
    prox_hier_inplace(structure, out, threshold);
    return out;
}

std::size_t first_zero_group(const HierGroupStructure& structure, const CoefVector& beta) {
    const auto mat = structure.as_matrix(beta);
    const std::size_t L = structure.lag();
    std::size_t first = L + 1;
    for (std::size_t l = L; l >= 1; --l) {
        if ((mat.row(static_cast<Eigen::Index>(l - 1)).array() != 0.0).any()) break;
        first = l;
    }
    return first;
}

bool zero_groups_suffix_closed(const HierGroupStructure& structure, const CoefVector& beta) {
    // A lag row that is zero across all series must start a zero suffix.
    const auto mat = structure.as_matrix(beta);
    const std::size_t first = first_zero_group(structure, beta);
    for (std::size_t j = 1; j < first; ++j) {
        if (!(mat.row(static_cast<Eigen::Index>(j - 1)).array() != 0.0).any()) return false;
    }
    return true;
}

} // namespace hierlag
