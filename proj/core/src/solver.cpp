#include "hierlag/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hierlag/errors.hpp"

namespace hierlag {
namespace {

constexpr int kObjectiveWindow = 5;

void check_dims(const DesignSystem& design, const HierGroupStructure& structure) {
    if (design.num_series() != structure.num_series() || design.lag() != structure.lag()) {
        throw Error(Errc::DimensionMismatch, "design and group structure disagree on M or L");
    }
}

/// Blockwise Gram data; makes each iteration O(M L^2) independent of D.
class GramSystem {
public:
    explicit GramSystem(const DesignSystem& design)
        : L_(static_cast<Eigen::Index>(design.lag())), inv_d_(1.0 / static_cast<double>(design.rows())) {
        grams_.reserve(design.num_series());
        xty_ = Eigen::VectorXd(static_cast<Eigen::Index>(design.cols()));
        for (std::size_t m = 0; m < design.num_series(); ++m) {
            const auto& b = design.block(m);
            grams_.push_back(b.transpose() * b);
            xty_.segment(static_cast<Eigen::Index>(m) * L_, L_) = b.transpose() * design.target(m);
            yty_ += design.target(m).squaredNorm();
        }
    }

    /// Writes X^T X beta into out.
    void gram_times(const CoefVector& beta, CoefVector& out) const {
        for (std::size_t m = 0; m < grams_.size(); ++m) {
            const auto off = static_cast<Eigen::Index>(m) * L_;
            out.segment(off, L_).noalias() = grams_[m] * beta.segment(off, L_);
        }
    }

    void gradient(const CoefVector& beta, CoefVector& grad) const {
        gram_times(beta, grad);
        grad = 2.0 * inv_d_ * (grad - xty_);
    }

    double loss(const CoefVector& beta, CoefVector& scratch) const {
        gram_times(beta, scratch);
        const double rss = yty_ - 2.0 * xty_.dot(beta) + beta.dot(scratch);
        return std::max(rss, 0.0) * inv_d_;
    }

    /// loss(to) - loss(from) as (d^T G (to + from) - 2 c^T d) / D with
    /// d = to - from; avoids the cancellation against y^T y.
    double loss_change(const CoefVector& from, const CoefVector& to, CoefVector& scratch) const {
        const CoefVector d = to - from;
        gram_times(to + from, scratch);
        return (d.dot(scratch) - 2.0 * xty_.dot(d)) * inv_d_;
    }

private:
    Eigen::Index L_;
    double inv_d_;
    std::vector<Eigen::MatrixXd> grams_;
    Eigen::VectorXd xty_;
    double yty_ = 0.0;
};

} // namespace

void SolverConfig::validate() const {
    if (max_iters < 1) throw Error(Errc::InvalidArgument, "max_iters must be >= 1");
    if (!(tol_fixed_point > 0.0) || !(tol_objective > 0.0)) {
        throw Error(Errc::InvalidArgument, "solver tolerances must be positive");
    }
    if (!(step_scale > 0.0 && step_scale <= 1.0)) {
        throw Error(Errc::InvalidArgument, "step_scale must lie in (0, 1]");
    }
}

double objective(const DesignSystem& design, const CoefVector& beta, double lambda) {
    if (lambda < 0.0) throw Error(Errc::InvalidArgument, "lambda must be nonnegative");
    const HierGroupStructure structure(design.num_series(), design.lag());
    structure.check(beta);
    const double loss = design.residual_sum_of_squares(beta) / static_cast<double>(design.rows());
    return lambda == 0.0 ? loss : loss + lambda * group_norm(structure, beta);
}

CoefVector loss_gradient(const DesignSystem& design, const CoefVector& beta) {
    const Eigen::VectorXd residual = design.apply(beta) - design.y();
    return (2.0 / static_cast<double>(design.rows())) * design.apply_transpose(residual);
}

double default_step(const DesignSystem& design, double step_scale) {
    const double lmax = gram_operator_norm(design);
    if (lmax <= 0.0) return std::numeric_limits<double>::infinity();
    return step_scale * static_cast<double>(design.rows()) / (2.0 * lmax);
}

double fixed_point_residual(const DesignSystem& design, const HierGroupStructure& structure,
                            const CoefVector& beta, double lambda, double step) {
    if (!(step > 0.0)) throw Error(Errc::InvalidArgument, "step must be positive");
    check_dims(design, structure);
    structure.check(beta);
    CoefVector z = beta - step * loss_gradient(design, beta);
    prox_hier_inplace(structure, z, step * lambda);
    return (beta - z).norm();
}

SolveResult fit(const DesignSystem& design, const HierGroupStructure& structure, double lambda,
                const SolverConfig& config, const CoefVector* warm_start) {
    config.validate();
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(Errc::InvalidArgument, "lambda must be finite and nonnegative");
    }
    check_dims(design, structure);

    const auto n = static_cast<Eigen::Index>(structure.dim());
    SolveResult result;
    result.beta = CoefVector::Zero(n);
    if (warm_start != nullptr) {
        structure.check(*warm_start);
        result.beta = *warm_start;
    }
    SolveTrace& trace = result.trace;

    const double lmax = gram_operator_norm(design);
    if (lmax <= 0.0) {
        // X = 0: the loss is constant, zero minimises the penalty.
        result.beta.setZero();
        trace.converged = true;
        trace.objective_per_iter.push_back(objective(design, result.beta, lambda));
        if (config.observer) config.observer(structure, result.beta);
        return result;
    }
    const double step = config.step_scale * static_cast<double>(design.rows()) / (2.0 * lmax);
    const double threshold = step * lambda;
    trace.step = step;

    const GramSystem gram(design);
    CoefVector scratch(n);
    CoefVector grad(n);
    auto penalty = [&](const CoefVector& b) { return lambda == 0.0 ? 0.0 : lambda * group_norm(structure, b); };
    auto change_of = [&](const CoefVector& from, const CoefVector& to) {
        return gram.loss_change(from, to, scratch) + penalty(to) - penalty(from);
    };
    auto prox_grad_step = [&](const CoefVector& from, CoefVector& to) {
        gram.gradient(from, grad);
        to = from - step * grad;
        prox_hier_inplace(structure, to, threshold);
    };
    auto residual_at = [&](const CoefVector& b) {
        CoefVector z(n);
        prox_grad_step(b, z);
        return (b - z).norm();
    };

    const bool accelerate = config.acceleration == Acceleration::FistaMonotone;
    CoefVector x = result.beta;
    CoefVector x_prev = x;
    CoefVector y = x;
    CoefVector z(n);
    // The recorded objective is the exact starting value plus accurately
    // computed per-step changes, each of which is <= 0.
    double fx = gram.loss(x, scratch) + penalty(x);
    double t = 1.0;
    int small_changes = 0;
    trace.objective_per_iter.reserve(static_cast<std::size_t>(std::min(config.max_iters, 4096)));

    for (int k = 1; k <= config.max_iters; ++k) {
        prox_grad_step(accelerate ? y : x, z);
        double delta = change_of(x, z);
        if (accelerate && delta > 0.0) {
            // Momentum overshot: restart from the last accepted iterate.
            t = 1.0;
            prox_grad_step(x, z);
            delta = change_of(x, z);
        }
        trace.iters_used = k;
        if (delta > 0.0) {
            // Even the plain step from x does not decrease the objective: we
            // are at roundoff level. Stay at x and stop.
            trace.objective_per_iter.push_back(fx);
            break;
        }

        x_prev = x;
        x = z;
        fx += delta;
        trace.objective_per_iter.push_back(fx);

        if (accelerate) {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = x + ((t - 1.0) / t_next) * (x - x_prev);
            t = t_next;
        }

        const double rel_change = -delta / std::max(std::abs(fx), std::numeric_limits<double>::min());
        small_changes = rel_change < config.tol_objective ? small_changes + 1 : 0;
        if (small_changes >= kObjectiveWindow && residual_at(x) <= config.tol_fixed_point) {
            break;
        }
    }

    result.beta = x;
    trace.fixed_point_residual = residual_at(x);
    trace.converged = trace.fixed_point_residual <= config.tol_fixed_point;
    if (config.observer) config.observer(structure, result.beta);
    return result;
}

} // namespace hierlag
