// hierlag: simulate AR data, fit the hierarchical lag model, evaluate fits
// and run Monte Carlo experiments.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hierlag/ar_core.hpp"
#include "hierlag/diagnostics.hpp"
#include "hierlag/errors.hpp"
#include "hierlag/harness/experiment.hpp"
#include "hierlag/harness/io.hpp"
#include "hierlag/harness/json_io.hpp"
#include "hierlag/pipeline.hpp"

using namespace hierlag;
using namespace hierlag::harness;

namespace {

struct SimulateArgs {
    std::vector<double> coeffs;
    double sigma = 1.0;
    std::size_t n = 0;
    std::size_t series = 1;
    std::uint64_t seed = 0;
    std::optional<std::size_t> burn_in;
    std::string output;
    std::string truth;
};

struct FitArgs {
    std::vector<std::string> inputs;
    std::string format = "auto";
    std::optional<std::size_t> L;
    std::optional<double> lambda;
    bool theory = false;
    std::string mode = "auto";
    std::string cv_rule = "1se";
    std::string cv_score = "refit";
    std::size_t folds = 5;
    std::size_t grid_size = 20;
    double epsilon = 0.5;
    double delta = 0.1;
    std::optional<double> lag_constant;
    std::optional<double> prefactor;
    std::optional<double> sigma_max;
    std::string output;
};

struct EvalArgs {
    std::string fit;
    std::string truth;
    std::vector<std::string> holdout;
    std::string output;
};

struct ExperimentArgs {
    std::string config;
    std::string output;
    std::string format;
    unsigned threads = 0;
};

void emit(const nlohmann::json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json_file(j, path);
    }
}

int run_simulate(const SimulateArgs& a) {
    const ARProcessSpec spec(a.coeffs, a.sigma);
    const std::size_t burn = a.burn_in ? *a.burn_in : default_burn_in(spec.lag());
    std::vector<std::vector<double>> series;
    for (std::size_t m = 0; m < a.series; ++m) {
        series.push_back(simulate_ar(spec, a.n, burn, a.seed + m).values);
    }
    if (a.series == 1 && a.output.ends_with(".wide.csv")) {
        save_series_wide(series.front(), a.output);
    } else {
        save_dataset_long(MultiSeriesDataset::from_series(std::move(series)), a.output);
    }
    if (!a.truth.empty()) write_json_file(to_json(Truth{{a.coeffs}, {a.sigma}}), a.truth);
    return 0;
}

int run_fit(const FitArgs& a) {
    const auto data = load_dataset(a.inputs, data_format_from_string(a.format));
    TheoryConstants c;
    c.epsilon = a.epsilon;
    c.delta = a.delta;
    c.lag_constant_override = a.lag_constant;
    c.lambda_prefactor_override = a.prefactor;
    c.lambda_override = a.lambda;
    PipelineOptions o;
    o.mode = pooling_mode_from_string(a.mode);
    o.lambda_selection = (a.theory || a.lambda) ? LambdaSelection::Theory : LambdaSelection::CrossValidation;
    o.lag_bound = a.L;
    o.sigma_max = a.sigma_max;
    o.cv.rule = cv_rule_from_string(a.cv_rule);
    o.cv.score = cv_score_from_string(a.cv_score);
    o.cv.folds = a.folds;
    o.cv.grid_size = a.grid_size;
    const auto fit = run_pipeline(data, c, o);
    emit(to_json(fit), a.output);
    if (!fit.trace.converged) std::cerr << "warning: solver did not converge\n";
    return 0;
}

int run_eval(const EvalArgs& a) {
    const FitResult fit = fit_result_from_json(read_json_file(a.fit));
    const Truth truth = truth_from_json(read_json_file(a.truth));
    const CoefVector beta = pad_true_coefficients(truth.coeffs, fit.num_series, fit.L_input);
    nlohmann::json out;
    out["schema_version"] = kSchemaVersion;
    out["est_error"] = estimation_error(fit.beta_hat, beta);
    out["false_discoveries"] = false_discoveries(fit.beta_hat, beta, fit.lambda_used);
    std::size_t true_lag = 0;
    for (const auto& c : truth.coeffs) true_lag = std::max(true_lag, c.size());
    out["true_lag"] = true_lag;
    out["L0_hat"] = fit.L0_hat;
    out["true_lag_recovered"] = fit.L0_hat == true_lag;
    out["stability"] = stability_census(std::span<const FitResult>(&fit, 1));
    if (!a.holdout.empty()) {
        out["prediction_mse"] = one_step_prediction_mse(fit.beta_tilde, load_dataset(a.holdout));
    }
    emit(out, a.output);
    return 0;
}

int run_experiment_cmd(const ExperimentArgs& a) {
    RunConfig config = run_config_from_json(read_json_file(a.config));
    if (!a.format.empty()) config.format = a.format;
    const std::string path = !a.output.empty() ? a.output : config.output_path;
    const auto report = run_experiment(config, a.threads);
    const std::string text = config.format == "json" ? report_json(report).dump(2) + "\n" : report_csv(report);
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        std::ofstream out(path);
        if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
        out << text;
    }
    if (report.failed_rows() == 0) return 0;
    std::cerr << report.failed_rows() << " row(s) failed:\n";
    for (const auto& r : report.rows) {
        if (!r.ok()) std::cerr << "  cell " << r.cell << " seed " << r.seed << ": " << r.status << '\n';
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical lag estimation for multiple autoregressive series"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Simulate AR series to CSV");
    s->add_option("--coeffs", sim.coeffs, "AR coefficients, lag 1 first")->required()->delimiter(',');
    s->add_option("--sigma", sim.sigma, "Noise standard deviation");
    s->add_option("--n", sim.n, "Observations per series")->required();
    s->add_option("--series", sim.series, "Number of series")->check(CLI::PositiveNumber);
    s->add_option("--seed", sim.seed, "Seed of series 0; series m uses seed + m")->required();
    s->add_option("--burn-in", sim.burn_in, "Discarded warm-up steps");
    s->add_option("-o,--output", sim.output, "Output CSV (long format; *.wide.csv for one wide series)")->required();
    s->add_option("--truth", sim.truth, "Also write the true coefficients as JSON");

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "Fit a dataset and write the result as JSON");
    f->add_option("--input", fit.inputs, "Input CSV file(s)")->required();
    f->add_option("--format", fit.format, "auto, wide or long");
    f->add_option("--L", fit.L, "Lag bound; chosen from the constants when absent");
    auto* lam = f->add_option("--lambda", fit.lambda, "Fixed lambda");
    f->add_flag("--theory", fit.theory, "Theory lambda instead of cross-validation")->excludes(lam);
    f->add_option("--mode", fit.mode, "identical, heterogeneous or auto");
    f->add_option("--cv-rule", fit.cv_rule, "min or 1se");
    f->add_option("--cv-score", fit.cv_score, "refit or penalized");
    f->add_option("--folds", fit.folds, "Cross-validation folds");
    f->add_option("--grid-size", fit.grid_size, "Cross-validation grid points");
    f->add_option("--epsilon", fit.epsilon, "Stability parameter");
    f->add_option("--delta", fit.delta, "Confidence level");
    f->add_option("--lag-constant", fit.lag_constant, "Constant in the lag bound");
    f->add_option("--prefactor", fit.prefactor, "Constant in front of the theory lambda rate");
    f->add_option("--sigma-max", fit.sigma_max, "Known largest noise sd");
    f->add_option("-o,--output", fit.output, "Output JSON (stdout if absent)");

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Compare a fit with the true coefficients");
    e->add_option("--fit", ev.fit, "Fit result JSON")->required();
    e->add_option("--truth", ev.truth, "Truth JSON")->required();
    e->add_option("--holdout", ev.holdout, "Holdout CSV file(s) for the prediction error");
    e->add_option("-o,--output", ev.output, "Output JSON (stdout if absent)");

    ExperimentArgs ex;
    auto* x = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a JSON config");
    x->add_option("--config", ex.config, "Config JSON")->required();
    x->add_option("-o,--output", ex.output, "Report path (config output_path or stdout if absent)");
    x->add_option("--format", ex.format, "csv or json, overriding the config");
    x->add_option("--threads", ex.threads, "Worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (s->parsed()) return run_simulate(sim);
        if (f->parsed()) return run_fit(fit);
        if (e->parsed()) return run_eval(ev);
        return run_experiment_cmd(ex);
    } catch (const std::exception& err) {
        std::cerr << "hierlag: " << err.what() << '\n';
        return 2;
    }
}
