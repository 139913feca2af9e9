// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Criteria can be selected on the command
// line, e.g. `hierlag_acceptance 1 4 10`; the default runs all of them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hierlag/ar_core.hpp"
#include "hierlag/design.hpp"
#include "hierlag/diagnostics.hpp"
#include "hierlag/errors.hpp"
#include "hierlag/hiergroup.hpp"
#include "hierlag/pipeline.hpp"
#include "hierlag/rng.hpp"
#include "hierlag/solver.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hierlag;
using testing_support::audit;
using testing_support::audited;
using testing_support::random_design;
using testing_support::random_vector;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome prox_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(101);
    std::uniform_int_distribution<std::size_t> Md(1, 3), Ld(1, 4);
    std::uniform_real_distribution<double> td(0.0, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t M = Md(gen), L = Ld(gen);
        const HierGroupStructure s(M, L);
        const CoefVector v = random_vector(gen, static_cast<Eigen::Index>(M * L), 1.5);
        const double t = td(gen);
        const CoefVector want = oracle::prox_dual_bcd(M, L, v, t);
        worst = std::max(worst, (prox_hier(s, v, t) - want).cwiseAbs().maxCoeff());
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-5 && secs < 60.0, fmt("max coordinate gap %.2e over 50 instances, %.1fs", worst, secs)};
}

Outcome solver_optimality() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(202);
    std::uniform_int_distribution<std::size_t> Md(1, 3), Ld(1, 4);
    std::uniform_real_distribution<double> lam(0.01, 0.6);
    double worst_gap = -1e300, worst_res = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t M = Md(gen), L = Ld(gen);
        const auto d = random_design(gen, M, L, 8, 30);
        const double lambda = lam(gen);
        const auto r = fit(d, HierGroupStructure(M, L), lambda, audited());
        const CoefVector star = oracle::admm_minimiser(d.dense(), d.y(), M, L, lambda);
        worst_gap = std::max(worst_gap, objective(d, r.beta, lambda) - objective(d, star, lambda));
        worst_res = std::max(worst_res, r.trace.fixed_point_residual);
    }
    const double secs = seconds_since(t0);
    return {worst_gap <= 1e-6 && worst_res <= 1e-8 && secs < 120.0,
            fmt("max objective excess %.2e, max residual %.2e, %.1fs", worst_gap, worst_res, secs)};
}

Outcome dual_bound() {
    std::mt19937_64 gen(404);
    const HierGroupStructure s(2, 3);
    double worst = -1e300;
    for (int k = 0; k < 100; ++k) {
        const CoefVector a = random_vector(gen, 6);
        const double found = oracle::dual_norm_ascent(s, a, 5000 + static_cast<std::uint64_t>(k));
        worst = std::max(worst, found - dual_norm_upper_bound(s, a));
    }
    return {worst <= 1e-6, fmt("max (ascent - bound) = %.3e over 100 draws", worst)};
}

// Criterion 5 runs, kept for the stability census.
std::vector<FitResult> g_recovery_fits;

Outcome lag_recovery() {
    const auto t0 = Clock::now();
    const ARProcessSpec spec({0.5, -0.3}, 1.0);
    int recovered = 0, clean = 0;
    const int N = 50;
    g_recovery_fits.clear();
    for (int s = 0; s < N; ++s) {
        Rng pick(1000 + static_cast<std::uint64_t>(s));
        std::vector<std::vector<double>> series;
        for (std::uint64_t m = 0; m < 8; ++m) {
            const std::size_t n = 309 + pick.uniform_index(201);
            series.push_back(simulate_ar(spec, n, 500, splitmix64(static_cast<std::uint64_t>(s) * 100 + m)).values);
        }
        TheoryConstants c;
        c.lag_constant_override = 5.0;
        PipelineOptions o;
        o.mode = PoolingMode::Identical;
        o.solver = audited();
        auto r = run_pipeline(MultiSeriesDataset::from_series(std::move(series)), c, o);
        const CoefVector truth = pad_true_coefficients({{0.5, -0.3}}, 8, r.L_input);
        recovered += r.L0_hat == 2;
        clean += false_discoveries(r.beta_hat, truth, r.lambda_used) == 0;
        g_recovery_fits.push_back(std::move(r));
    }
    const double secs = seconds_since(t0);
    const bool pass = recovered >= 45 && clean >= 45 && secs < 300.0;
    return {pass, fmt("L0_hat=2 in %d/%d, no false discoveries in %d/%d, L=%zu, %.1fs", recovered, N, clean, N,
                      g_recovery_fits.front().L_input, secs)};
}

Outcome stability() {
    if (g_recovery_fits.empty()) lag_recovery();
    const double frac = stability_census(g_recovery_fits);
    return {frac >= 0.98, fmt("stable fraction %.3f over %zu fits", frac, g_recovery_fits.size())};
}

Outcome rate_check() {
    const auto t0 = Clock::now();
    const ARProcessSpec spec({0.5, -0.3}, 1.0);
    const std::size_t L = 8, M = 4;
    const CoefVector truth = pad_true_coefficients({{0.5, -0.3}}, M, L);
    std::vector<double> lx, ly;
    std::string meds;
    for (std::size_t D : {2000, 4000, 8000, 16000}) {
        std::vector<double> errs;
        for (std::uint64_t s = 0; s < 30; ++s) {
            std::vector<std::vector<double>> series;
            for (std::uint64_t m = 0; m < M; ++m) {
                series.push_back(simulate_ar(spec, D / M + L, 500, splitmix64(D * 1000 + s * 10 + m)).values);
            }
            TheoryConstants c;
            c.lambda_prefactor_override = 0.1;
            PipelineOptions o;
            o.mode = PoolingMode::Identical;
            o.lag_bound = L;
            o.lambda_selection = LambdaSelection::Theory;
            o.solver = audited();
            const auto r = run_pipeline(MultiSeriesDataset::from_series(std::move(series)), c, o);
            errs.push_back(estimation_error(r.beta_hat, truth));
        }
        const double med = median(errs);
        meds += fmt("%s%zu:%.4f", meds.empty() ? "" : " ", D, med);
        lx.push_back(std::log(static_cast<double>(D)));
        ly.push_back(std::log(med));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / static_cast<double>(lx.size());
        my += ly[i] / static_cast<double>(ly.size());
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    const double slope = sxy / sxx;
    const double secs = seconds_since(t0);
    return {slope >= -0.65 && slope <= -0.35 && secs < 600.0,
            fmt("log-log slope %.3f (median errors %s), %.1fs", slope, meds.c_str(), secs)};
}

// Median holdout MSE over well-fit models (converged, all consolidated models
// stable) and how many of the 30 seeds qualified.
std::pair<double, int> prediction_run(const PipelineOptions& base) {
    const ARProcessSpec spec({0.5, -0.3}, 1.0);
    std::vector<double> mses;
    for (std::uint64_t s = 0; s < 30; ++s) {
        std::vector<std::vector<double>> train, holdout;
        for (std::uint64_t m = 0; m < 4; ++m) {
            const auto x = simulate_ar(spec, 4000, 500, splitmix64(77000 + s * 10 + m)).values;
            train.emplace_back(x.begin(), x.begin() + 2000);
            holdout.emplace_back(x.begin() + 2000, x.end());
        }
        TheoryConstants c;
        c.lag_constant_override = 5.0;
        PipelineOptions o = base;
        o.solver = audited();
        const auto r = run_pipeline(MultiSeriesDataset::from_series(std::move(train)), c, o);
        const bool stable = std::all_of(r.stability.begin(), r.stability.end(),
                                        [](const StabilityReport& q) { return q.is_stable; });
        if (!r.trace.converged || !stable) continue;
        mses.push_back(one_step_prediction_mse(r.beta_tilde, MultiSeriesDataset::from_series(std::move(holdout))));
    }
    if (mses.empty()) return {INFINITY, 0};
    return {median(mses), static_cast<int>(mses.size())};
}

Outcome prediction_floor() {
    // The noise variance is 1 in every series, so sigma-bar squared is 1.
    PipelineOptions pred;
    pred.mode = PoolingMode::Identical;
    pred.cv.score = CvScore::Penalized;
    pred.cv.rule = CvRule::MinError;
    const auto [ratio, used] = prediction_run(pred);
    PipelineOptions dflt;
    dflt.mode = PoolingMode::Identical;
    const auto [ratio_default, used_default] = prediction_run(dflt);
    return {std::abs(ratio - 1.0) <= 0.10,
            fmt("median MSE / sigma^2 = %.4f over %d well-fit models (penalized/min CV); default CV: %.4f over %d",
                ratio, used, ratio_default, used_default)};
}

Outcome re_frequency() {
    const std::size_t L = 10, T = 500;
    const double zeta = 0.3;
    const std::size_t s = re_sparsity(T, zeta, L);
    int ok = 0;
    double lowest = INFINITY;
    for (std::uint64_t k = 0; k < 100; ++k) {
        Rng r(9000 + k);
        std::vector<double> b;
        StabilityReport rep;
        do {
            b = {r.uniform() * 1.6 - 0.8, r.uniform() * 1.2 - 0.6};
            rep = stability_report(b);
        } while (!rep.is_stable || rep.epsilon_certified < 0.2);
        const auto x = simulate_ar(ARProcessSpec(b, 1.0), T + L, 500, splitmix64(k)).values;
        const auto d = build_design(MultiSeriesDataset::from_series({x}), L);
        const double q = empirical_re_ratio(d.block(0), 1.0, rep.epsilon_certified, 200, s, 31 + k);
        ok += q >= 1.0;
        lowest = std::min(lowest, q);
    }
    return {ok >= 95 && s >= 2 && s <= L, fmt("ratio >= 1 in %d/100 blocks (s=%zu, min ratio %.3f)", ok, s, lowest)};
}

Outcome formula_regression() {
    // Hand-computed with 30-digit arithmetic:
    // 24 sqrt(84 e) (216 / 0.9^4) (1 + 0.9^-2 + 0.9^-4) sqrt(3 log(60) / 400).
    constexpr double kLambda = 78640.326931556693649;
    std::vector<std::vector<double>> series;
    for (std::uint64_t m = 0; m < 2; ++m) {
        series.push_back(simulate_ar(ARProcessSpec({0.5, -0.3}, 1.0), 103, 500, 7 + m).values);
    }
    const auto d = build_design(MultiSeriesDataset::from_series(std::move(series)), 3);
    TheoryConstants c;
    c.epsilon = 0.9;
    const double lambda = compute_lambda(d, HierGroupStructure(2, 3), c, 1.0);
    const double rel = std::abs(lambda / kLambda - 1.0);

    // Largest L with L (1 + 5 log(40 L)) <= 500 by direct scan: 15.
    TheoryConstants five;
    five.lag_constant_override = 5.0;
    const std::size_t L_five = select_lag_bound(500, 4, five);
    TheoryConstants zero;
    zero.lag_constant_override = 0.0;
    const std::size_t L_zero = select_lag_bound(37, 3, zero);
    bool infeasible = false;
    try {
        select_lag_bound(1000000, 10, c);
    } catch (const Error& e) {
        infeasible = e.code() == Errc::LagBoundInfeasible;
    }
    const bool pass = rel < 5e-11 && L_five == 15 && L_zero == 36 && infeasible;
    return {pass, fmt("lambda %.10g (rel err %.1e), L(500,4,C=5)=%zu, L(37,3,C=0)=%zu, theory constants %s",
                      lambda, rel, L_five, L_zero, infeasible ? "infeasible" : "feasible")};
}

Outcome sparsity_audit() {
    const long fits = audit().fits.load();
    const long bad = audit().violations.load();
    return {bad == 0 && fits > 0, fmt("%ld violations over %ld audited fits", bad, fits)};
}

} // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria = {
        {1, {"prox matches numerical minimiser", prox_oracle}},
        {2, {"solver optimality", solver_optimality}},
        {4, {"dual-norm bound", dual_bound}},
        {5, {"lag recovery", lag_recovery}},
        {6, {"stability census", stability}},
        {7, {"estimation rate", rate_check}},
        {8, {"prediction floor", prediction_floor}},
        {9, {"restricted eigenvalue frequency", re_frequency}},
        {10, {"formula regression", formula_regression}},
        // Last, so it sees every fit made above.
        {3, {"hierarchical sparsity of every fit", sparsity_audit}},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    const std::vector<int> order = {1, 2, 4, 5, 6, 7, 8, 9, 10, 3};

    int failed = 0;
    for (int id : order) {
        if (!wanted.empty() && !wanted.count(id) && id != 3) continue;
        const auto& [name, run] = criteria.at(id);
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
