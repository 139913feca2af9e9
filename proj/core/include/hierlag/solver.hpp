#pragma once

#include <functional>
#include <vector>

#include "hierlag/design.hpp"
#include "hierlag/hiergroup.hpp"

namespace hierlag {

enum class Acceleration {
    Ista,
    /// FISTA whose momentum is reset whenever a step would raise the
    /// objective; the step is then retaken from the last accepted iterate.
    FistaMonotone,
};

struct SolverConfig {
    int max_iters = 50000;
    double tol_fixed_point = 1e-8;
    double tol_objective = 1e-10;
    Acceleration acceleration = Acceleration::FistaMonotone;
    double step_scale = 1.0;  ///< in (0, 1]
    /// Invoked with every solution fit() returns. Used to audit fits made
    /// deep inside the pipeline (e.g. during cross-validation).
    std::function<void(const HierGroupStructure&, const CoefVector&)> observer;

    void validate() const;
};

struct SolveTrace {
    std::vector<double> objective_per_iter;
    double fixed_point_residual = 0.0;
    int iters_used = 0;
    bool converged = false;
    double step = 0.0;
};

struct SolveResult {
    CoefVector beta;
    SolveTrace trace;
};

/// f(beta) = (1/D) ||y - X beta||^2 + lambda N(beta).
double objective(const DesignSystem& design, const CoefVector& beta, double lambda);

/// (2/D) X^T (X beta - y).
CoefVector loss_gradient(const DesignSystem& design, const CoefVector& beta);

/// step_scale * D / (2 Lambda_max(X^T X)); the reciprocal Lipschitz constant
/// of the loss gradient when step_scale = 1.
double default_step(const DesignSystem& design, double step_scale = 1.0);

/// ||beta - prox_hier(beta - step * grad, step * lambda)||_2; zero exactly at
/// minimisers of the objective.
double fixed_point_residual(const DesignSystem& design, const HierGroupStructure& structure,
                            const CoefVector& beta, double lambda, double step);

/// Proximal-gradient minimisation of the objective, started from zero or from
/// `warm_start` when given. Stops when the fixed-point residual is below
/// tol_fixed_point and the relative objective change stayed below
/// tol_objective for 5 consecutive iterations. Non-convergence is reported in
/// the trace, not thrown.
SolveResult fit(const DesignSystem& design, const HierGroupStructure& structure, double lambda,
                const SolverConfig& config = {}, const CoefVector* warm_start = nullptr);

} // namespace hierlag
