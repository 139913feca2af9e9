#include "hierlag/design.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hierlag/errors.hpp"

namespace hierlag {

std::size_t MultiSeriesDataset::min_length() const {
    std::size_t n = series.empty() ? 0 : series.front().size();
    for (const auto& s : series) n = std::min(n, s.size());
    return n;
}

std::size_t MultiSeriesDataset::max_length() const {
    std::size_t n = 0;
    for (const auto& s : series) n = std::max(n, s.size());
    return n;
}

void MultiSeriesDataset::validate() const {
    if (series.empty()) {
        throw Error(Errc::InvalidArgument, "dataset has no series");
    }
    if (labels.size() != series.size()) {
        throw Error(Errc::InvalidArgument, "label count does not match series count");
    }
    std::set<std::string> seen;
    for (std::size_t m = 0; m < series.size(); ++m) {
        if (series[m].empty()) {
            throw Error(Errc::EmptySeries, "series '" + labels[m] + "' is empty");
        }
        if (series[m].size() < 2) {
            throw Error(Errc::InvalidArgument, "series '" + labels[m] + "' has fewer than 2 observations");
        }
        for (double v : series[m]) {
            if (!std::isfinite(v)) {
                throw Error(Errc::InvalidArgument, "series '" + labels[m] + "' has a non-finite value");
            }
        }
        if (!seen.insert(labels[m]).second) {
            throw Error(Errc::InvalidArgument, "duplicate series label '" + labels[m] + "'");
        }
    }
}

MultiSeriesDataset MultiSeriesDataset::from_series(std::vector<std::vector<double>> series,
                                                   std::vector<std::string> labels) {
    MultiSeriesDataset ds;
    ds.series = std::move(series);
    if (labels.empty()) {
        for (std::size_t m = 0; m < ds.series.size(); ++m) labels.push_back("s" + std::to_string(m));
    }
    ds.labels = std::move(labels);
    ds.validate();
    return ds;
}

DesignSystem::DesignSystem(std::vector<Eigen::MatrixXd> blocks, std::vector<Eigen::VectorXd> targets)
    : blocks_(std::move(blocks)), targets_(std::move(targets)) {
    if (blocks_.empty() || blocks_.size() != targets_.size()) {
        throw Error(Errc::DimensionMismatch, "design needs one target per nonempty block list");
    }
    lag_ = static_cast<std::size_t>(blocks_.front().cols());
    if (lag_ == 0) {
        throw Error(Errc::DimensionMismatch, "design blocks need at least one column");
    }
    for (std::size_t m = 0; m < blocks_.size(); ++m) {
        if (static_cast<std::size_t>(blocks_[m].cols()) != lag_) {
            throw Error(Errc::DimensionMismatch, "all design blocks must have L columns");
        }
        if (blocks_[m].rows() < 1 || blocks_[m].rows() != targets_[m].size()) {
            throw Error(Errc::DimensionMismatch, "block rows must match its target length and be >= 1");
        }
        rows_ += static_cast<std::size_t>(blocks_[m].rows());
    }
}

std::vector<std::size_t> DesignSystem::block_sizes() const {
    std::vector<std::size_t> sizes;
    sizes.reserve(blocks_.size());
    for (const auto& b : blocks_) sizes.push_back(static_cast<std::size_t>(b.rows()));
    return sizes;
}

Eigen::VectorXd DesignSystem::y() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows_));
    Eigen::Index offset = 0;
    for (const auto& t : targets_) {
        out.segment(offset, t.size()) = t;
        offset += t.size();
    }
    return out;
}

Eigen::VectorXd DesignSystem::apply(const Eigen::VectorXd& beta) const {
    if (static_cast<std::size_t>(beta.size()) != cols()) {
        throw Error(Errc::DimensionMismatch, "beta length must be M*L");
    }
    const auto L = static_cast<Eigen::Index>(lag_);
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows_));
    Eigen::Index offset = 0;
    for (std::size_t m = 0; m < blocks_.size(); ++m) {
        const auto& b = blocks_[m];
        out.segment(offset, b.rows()).noalias() = b * beta.segment(static_cast<Eigen::Index>(m) * L, L);
        offset += b.rows();
    }
    return out;
}

Eigen::VectorXd DesignSystem::apply_transpose(const Eigen::VectorXd& r) const {
    if (static_cast<std::size_t>(r.size()) != rows_) {
        throw Error(Errc::DimensionMismatch, "vector length must be D");
    }
    const auto L = static_cast<Eigen::Index>(lag_);
    Eigen::VectorXd out(static_cast<Eigen::Index>(cols()));
    Eigen::Index offset = 0;
    for (std::size_t m = 0; m < blocks_.size(); ++m) {
        const auto& b = blocks_[m];
        out.segment(static_cast<Eigen::Index>(m) * L, L).noalias() =
            b.transpose() * r.segment(offset, b.rows());
        offset += b.rows();
    }
    return out;
}

double DesignSystem::residual_sum_of_squares(const Eigen::VectorXd& beta) const {
    if (static_cast<std::size_t>(beta.size()) != cols()) {
        throw Error(Errc::DimensionMismatch, "beta length must be M*L");
    }
    const auto L = static_cast<Eigen::Index>(lag_);
    double rss = 0.0;
    for (std::size_t m = 0; m < blocks_.size(); ++m) {
        rss += (targets_[m] - blocks_[m] * beta.segment(static_cast<Eigen::Index>(m) * L, L)).squaredNorm();
    }
    return rss;
}

Eigen::MatrixXd DesignSystem::dense() const {
    const auto L = static_cast<Eigen::Index>(lag_);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols()));
    Eigen::Index offset = 0;
    for (std::size_t m = 0; m < blocks_.size(); ++m) {
        x.block(offset, static_cast<Eigen::Index>(m) * L, blocks_[m].rows(), L) = blocks_[m];
        offset += blocks_[m].rows();
    }
    return x;
}

DesignSystem DesignSystem::select_rows(const std::vector<std::vector<std::size_t>>& rows_per_block) const {
    if (rows_per_block.size() != blocks_.size()) {
        throw Error(Errc::DimensionMismatch, "row selection needs one index list per block");
    }
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<Eigen::VectorXd> targets;
    blocks.reserve(blocks_.size());
    targets.reserve(blocks_.size());
    for (std::size_t m = 0; m < blocks_.size(); ++m) {
        const auto& idx = rows_per_block[m];
        Eigen::MatrixXd b(static_cast<Eigen::Index>(idx.size()), blocks_[m].cols());
        Eigen::VectorXd t(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] >= static_cast<std::size_t>(blocks_[m].rows())) {
                throw Error(Errc::DimensionMismatch, "row index out of range");
            }
            b.row(static_cast<Eigen::Index>(i)) = blocks_[m].row(static_cast<Eigen::Index>(idx[i]));
            t(static_cast<Eigen::Index>(i)) = targets_[m](static_cast<Eigen::Index>(idx[i]));
        }
        blocks.push_back(std::move(b));
        targets.push_back(std::move(t));
    }
    return DesignSystem(std::move(blocks), std::move(targets));
}

DesignSystem build_design(const MultiSeriesDataset& dataset, std::size_t L) {
    if (L == 0) {
        throw Error(Errc::InvalidArgument, "lag bound L must be >= 1");
    }
    std::vector<Eigen::MatrixXd> blocks;
    std::vector<Eigen::VectorXd> targets;
    blocks.reserve(dataset.num_series());
    targets.reserve(dataset.num_series());
    for (std::size_t m = 0; m < dataset.num_series(); ++m) {
        const auto& x = dataset.series[m];
        if (x.size() <= L) {
            throw LagTooLarge(m, x.size(), L);
        }
        const std::size_t T = x.size() - L;
        Eigen::MatrixXd b(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(L));
        Eigen::VectorXd t(static_cast<Eigen::Index>(T));
        // Observation index L + r is the target of row r; its lag l value sits at L + r - l.
        for (std::size_t r = 0; r < T; ++r) {
            t(static_cast<Eigen::Index>(r)) = x[L + r];
            for (std::size_t l = 1; l <= L; ++l) {
                b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l - 1)) = x[L + r - l];
            }
        }
        blocks.push_back(std::move(b));
        targets.push_back(std::move(t));
    }
    return DesignSystem(std::move(blocks), std::move(targets));
}

double power_iteration_max_eigenvalue(const Eigen::MatrixXd& sym, double rel_tol, int max_iters) {
    const Eigen::Index n = sym.rows();
    if (n == 0) return 0.0;
    if (n == 1) return sym(0, 0);
    // Fixed start with distinct entries so it is not orthogonal to the top eigenvector
    // except on a measure-zero set.
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.1 * static_cast<double>(i) / static_cast<double>(n);
    v.normalize();
    double rayleigh = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd w = sym * v;
        rayleigh = v.dot(w);
        const double wn = w.norm();
        if (wn == 0.0) return 0.0;
        const double residual = (w - rayleigh * v).norm();
        if (residual <= rel_tol * std::abs(rayleigh)) {
            break;
        }
        v = w / wn;
    }
    return rayleigh;
}

double gram_operator_norm(const DesignSystem& design, double rel_tol) {
    double best = 0.0;
    for (std::size_t m = 0; m < design.num_series(); ++m) {
        const Eigen::MatrixXd gram = design.block(m).transpose() * design.block(m);
        best = std::max(best, power_iteration_max_eigenvalue(gram, rel_tol));
    }
    return best;
}

} // namespace hierlag
