#include "hierlag/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "hierlag/ar_core.hpp"
#include "hierlag/diagnostics.hpp"
#include "hierlag/errors.hpp"
#include "hierlag/harness/io.hpp"
#include "hierlag/harness/json_io.hpp"
#include "hierlag/parallel.hpp"
#include "hierlag/rng.hpp"

namespace hierlag::harness {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw Error(Errc::InvalidArgument, where + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw Error(Errc::InvalidArgument, "unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j[key].get<T>();
}

const char* acceleration_name(Acceleration a) {
    return a == Acceleration::Ista ? "ista" : "fista_monotone";
}

Acceleration acceleration_from_string(const std::string& s) {
    if (s == "ista") return Acceleration::Ista;
    if (s == "fista_monotone") return Acceleration::FistaMonotone;
    throw Error(Errc::InvalidArgument, "unknown acceleration '" + s + "'");
}

LambdaSelection selection_from_string(const std::string& s) {
    if (s == "cv") return LambdaSelection::CrossValidation;
    if (s == "theory") return LambdaSelection::Theory;
    throw Error(Errc::InvalidArgument, "unknown lambda_selection '" + s + "'");
}

TheoryConstants constants_from_json(const json& j) {
    reject_unknown(j, {"A", "delta", "epsilon", "zeta", "c0", "lag_constant_override", "lambda_prefactor_override",
                       "lambda_override"},
                   "constants");
    TheoryConstants c;
    read(j, "A", c.A);
    read(j, "delta", c.delta);
    read(j, "epsilon", c.epsilon);
    read_opt(j, "zeta", c.zeta);
    read(j, "c0", c.c0);
    read_opt(j, "lag_constant_override", c.lag_constant_override);
    read_opt(j, "lambda_prefactor_override", c.lambda_prefactor_override);
    read_opt(j, "lambda_override", c.lambda_override);
    return c;
}

json to_json(const TheoryConstants& c) {
    json j = {{"A", c.A}, {"delta", c.delta}, {"epsilon", c.epsilon}, {"c0", c.c0}};
    if (c.zeta) j["zeta"] = *c.zeta;
    if (c.lag_constant_override) j["lag_constant_override"] = *c.lag_constant_override;
    if (c.lambda_prefactor_override) j["lambda_prefactor_override"] = *c.lambda_prefactor_override;
    if (c.lambda_override) j["lambda_override"] = *c.lambda_override;
    return j;
}

SolverConfig solver_from_json(const json& j) {
    reject_unknown(j, {"max_iters", "tol_fixed_point", "tol_objective", "acceleration", "step_scale"}, "solver");
    SolverConfig s;
    read(j, "max_iters", s.max_iters);
    read(j, "tol_fixed_point", s.tol_fixed_point);
    read(j, "tol_objective", s.tol_objective);
    if (j.contains("acceleration")) s.acceleration = acceleration_from_string(j["acceleration"].get<std::string>());
    read(j, "step_scale", s.step_scale);
    return s;
}

CrossValidationConfig cv_from_json(const json& j) {
    reject_unknown(j, {"folds", "grid_size", "min_ratio", "rule", "score"}, "cv");
    CrossValidationConfig c;
    read(j, "folds", c.folds);
    read(j, "grid_size", c.grid_size);
    read(j, "min_ratio", c.min_ratio);
    if (j.contains("rule")) c.rule = cv_rule_from_string(j["rule"].get<std::string>());
    if (j.contains("score")) c.score = cv_score_from_string(j["score"].get<std::string>());
    return c;
}

ExperimentCell cell_from_json(const json& j) {
    reject_unknown(j, {"M", "coeffs", "T", "sigma", "epsilon"}, "grid cell");
    ExperimentCell c;
    c.M = j.at("M").get<std::size_t>();
    c.coeffs = j.at("coeffs").get<std::vector<double>>();
    c.T = j.at("T").get<std::size_t>();
    read(j, "sigma", c.sigma);
    read_opt(j, "epsilon", c.epsilon);
    return c;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ExperimentRow run_row(const RunConfig& config, std::size_t cell_index, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentCell& cell = config.grid[cell_index];
    ExperimentRow row;
    row.cell = cell_index;
    row.seed = seed;
    row.M = cell.M;
    row.L0 = cell.coeffs.size();
    row.T = cell.T;
    try {
        const ARProcessSpec spec(cell.coeffs, cell.sigma);
        const std::size_t burn = default_burn_in(spec.lag());
        std::vector<std::vector<double>> train, holdout;
        for (std::size_t m = 0; m < cell.M; ++m) {
            train.push_back(simulate_ar(spec, cell.T, burn, series_seed(seed, cell_index, m)).values);
            holdout.push_back(simulate_ar(spec, cell.T, burn, series_seed(seed, cell_index, cell.M + m)).values);
        }
        TheoryConstants constants = config.constants;
        if (cell.epsilon) constants.epsilon = *cell.epsilon;
        PipelineOptions options;
        options.mode = config.mode;
        options.lambda_selection = config.lambda_selection;
        options.lag_bound = config.lag_bound;
        options.cv = config.cv;
        if (config.lambda_grid) options.cv.grid = *config.lambda_grid;
        options.solver = config.solver;
        const auto fit = run_pipeline(MultiSeriesDataset::from_series(std::move(train)), constants, options);

        const CoefVector truth = pad_true_coefficients({cell.coeffs}, cell.M, fit.L_input);
        row.L = fit.L_input;
        row.D = cell.M * (cell.T - fit.L_input);
        row.lambda = fit.lambda_used;
        row.L0_hat = fit.L0_hat;
        row.est_error = estimation_error(fit.beta_hat, truth);
        row.false_discoveries = false_discoveries(fit.beta_hat, truth, fit.lambda_used);
        const FitResult* one = &fit;
        row.stability = stability_census(std::span<const FitResult>(one, 1));
        row.prediction_mse = one_step_prediction_mse(fit.beta_tilde, MultiSeriesDataset::from_series(std::move(holdout)));
    } catch (const std::exception& e) {
        row.status = e.what();
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + '"';
}

} // namespace

void RunConfig::validate() const {
    static const std::set<std::string> commands = {"simulate", "fit", "eval", "experiment"};
    if (!commands.count(command)) throw Error(Errc::InvalidArgument, "unknown command '" + command + "'");
    if (format != "csv" && format != "json") throw Error(Errc::InvalidArgument, "format must be csv or json");
    if ((command == "simulate" || command == "experiment") && seeds.empty()) {
        throw Error(Errc::InvalidArgument, "seeds must be nonempty for " + command);
    }
    if (command == "experiment") {
        if (grid.empty()) throw Error(Errc::InvalidArgument, "experiment needs a nonempty grid");
        for (const auto& c : grid) {
            if (c.M < 1 || c.T < 2) throw Error(Errc::InvalidArgument, "grid cells need M >= 1 and T >= 2");
        }
    }
    if (lambda_grid) {
        if (lambda_grid->empty()) throw Error(Errc::InvalidArgument, "lambda_grid is empty");
        for (double v : *lambda_grid) {
            if (!(v > 0.0)) throw Error(Errc::InvalidArgument, "lambda_grid values must be positive");
        }
    }
    constants.validate();
    solver.validate();
}

RunConfig run_config_from_json(const json& j) {
    reject_unknown(j, {"command", "input_paths", "output_path", "constants", "solver", "mode", "seeds", "lambda_grid",
                       "format", "grid", "lambda_selection", "lag_bound", "cv"},
                   "config");
    RunConfig c;
    try {
        read(j, "command", c.command);
        read(j, "input_paths", c.input_paths);
        read(j, "output_path", c.output_path);
        if (j.contains("constants")) c.constants = constants_from_json(j["constants"]);
        if (j.contains("solver")) c.solver = solver_from_json(j["solver"]);
        if (j.contains("mode")) c.mode = pooling_mode_from_string(j["mode"].get<std::string>());
        read(j, "seeds", c.seeds);
        read_opt(j, "lambda_grid", c.lambda_grid);
        read(j, "format", c.format);
        if (j.contains("grid")) {
            for (const auto& cell : j["grid"]) c.grid.push_back(cell_from_json(cell));
        }
        if (j.contains("lambda_selection")) {
            c.lambda_selection = selection_from_string(j["lambda_selection"].get<std::string>());
        }
        read_opt(j, "lag_bound", c.lag_bound);
        if (j.contains("cv")) c.cv = cv_from_json(j["cv"]);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["input_paths"] = c.input_paths;
    j["output_path"] = c.output_path;
    j["constants"] = to_json(c.constants);
    j["solver"] = {{"max_iters", c.solver.max_iters},
                   {"tol_fixed_point", c.solver.tol_fixed_point},
                   {"tol_objective", c.solver.tol_objective},
                   {"acceleration", acceleration_name(c.solver.acceleration)},
                   {"step_scale", c.solver.step_scale}};
    j["mode"] = to_string(c.mode);
    j["seeds"] = c.seeds;
    if (c.lambda_grid) j["lambda_grid"] = *c.lambda_grid;
    j["format"] = c.format;
    j["grid"] = json::array();
    for (const auto& cell : c.grid) {
        json g = {{"M", cell.M}, {"coeffs", cell.coeffs}, {"T", cell.T}, {"sigma", cell.sigma}};
        if (cell.epsilon) g["epsilon"] = *cell.epsilon;
        j["grid"].push_back(std::move(g));
    }
    j["lambda_selection"] = c.lambda_selection == LambdaSelection::Theory ? "theory" : "cv";
    if (c.lag_bound) j["lag_bound"] = *c.lag_bound;
    j["cv"] = {{"folds", c.cv.folds},
               {"grid_size", c.cv.grid_size},
               {"min_ratio", c.cv.min_ratio},
               {"rule", to_string(c.cv.rule)},
               {"score", to_string(c.cv.score)}};
    return j;
}

std::uint64_t series_seed(std::uint64_t seed, std::size_t cell, std::size_t stream) {
    return splitmix64(splitmix64(seed) ^ (static_cast<std::uint64_t>(cell) << 32) ^ stream);
}

std::size_t ExperimentReport::failed_rows() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.ok(); }));
}

ExperimentReport run_experiment(const RunConfig& config, unsigned workers) {
    config.validate();
    const std::size_t S = config.seeds.size();
    ExperimentReport report;
    report.rows.resize(config.grid.size() * S);
    parallel_for(
        report.rows.size(),
        [&](std::size_t i) { report.rows[i] = run_row(config, i / S, config.seeds[i % S]); },
        workers);

    std::map<std::size_t, std::vector<double>> by_D;
    for (const auto& r : report.rows) {
        if (r.ok()) by_D[r.D].push_back(r.est_error);
    }
    if (by_D.size() >= 2) {
        std::vector<double> lx, ly;
        for (const auto& [D, errs] : by_D) {
            lx.push_back(std::log(static_cast<double>(D)));
            ly.push_back(std::log(median(errs)));
        }
        const double n = static_cast<double>(lx.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i] / n;
            my += ly[i] / n;
        }
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        report.slope = sxy / sxx;
    }
    return report;
}

std::string report_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "kind,cell,seed,M,L0,T,D,L,lambda,L0_hat,est_error,false_discoveries,stability,prediction_mse,"
           "runtime_ms,status,slope\n";
    for (const auto& r : report.rows) {
        out << "row," << r.cell << ',' << r.seed << ',' << r.M << ',' << r.L0 << ',' << r.T << ',' << r.D << ','
            << r.L << ',' << format_double(r.lambda) << ',' << r.L0_hat << ',' << format_double(r.est_error) << ','
            << r.false_discoveries << ',' << format_double(r.stability) << ',' << format_double(r.prediction_mse)
            << ',' << format_double(r.runtime_ms) << ',' << csv_field(r.status) << ",\n";
    }
    out << "summary,,,,,,,,,,,,,,," << (report.failed_rows() == 0 ? "ok" : "failed_rows=" + std::to_string(report.failed_rows()))
        << ',' << (report.slope ? format_double(*report.slope) : "") << '\n';
    return out.str();
}

json report_json(const ExperimentReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"cell", r.cell},
                        {"seed", r.seed},
                        {"M", r.M},
                        {"L0", r.L0},
                        {"T", r.T},
                        {"D", r.D},
                        {"L", r.L},
                        {"lambda", r.lambda},
                        {"L0_hat", r.L0_hat},
                        {"est_error", r.est_error},
                        {"false_discoveries", r.false_discoveries},
                        {"stability", r.stability},
                        {"prediction_mse", r.prediction_mse},
                        {"runtime_ms", r.runtime_ms},
                        {"status", r.status}});
    }
    return {{"schema_version", kSchemaVersion},
            {"rows", std::move(rows)},
            {"summary",
             {{"rows", report.rows.size()},
              {"failed_rows", report.failed_rows()},
              {"slope", report.slope ? json(*report.slope) : json(nullptr)}}}};
}

} // namespace hierlag::harness
