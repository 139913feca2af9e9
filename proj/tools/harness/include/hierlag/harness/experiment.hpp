#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hierlag/pipeline.hpp"
#include "hierlag/solver.hpp"

namespace hierlag::harness {

/// One simulation setting: M series of length T from AR(coeffs) with noise
/// sd sigma. epsilon, when set, replaces constants.epsilon for the cell.
struct ExperimentCell {
    std::size_t M = 1;
    std::vector<double> coeffs;
    std::size_t T = 0;
    double sigma = 1.0;
    std::optional<double> epsilon;
};

struct RunConfig {
    std::string command = "experiment";  ///< simulate | fit | eval | experiment
    std::vector<std::string> input_paths;
    std::string output_path;
    TheoryConstants constants;
    SolverConfig solver;
    PoolingMode mode = PoolingMode::Auto;
    std::vector<std::uint64_t> seeds;
    std::optional<std::vector<double>> lambda_grid;  ///< explicit CV grid
    std::string format = "csv";                      ///< csv | json
    std::vector<ExperimentCell> grid;
    LambdaSelection lambda_selection = LambdaSelection::CrossValidation;
    std::optional<std::size_t> lag_bound;
    CrossValidationConfig cv;

    /// Throws InvalidArgument on inconsistent settings.
    void validate() const;
};

/// Strict: unknown keys are rejected so that typos do not pass silently.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

struct ExperimentRow {
    std::size_t cell = 0;
    std::uint64_t seed = 0;
    std::size_t M = 0;
    std::size_t L0 = 0;
    std::size_t T = 0;
    std::size_t D = 0;
    std::size_t L = 0;
    double lambda = 0.0;
    std::size_t L0_hat = 0;
    double est_error = 0.0;
    std::size_t false_discoveries = 0;
    double stability = 0.0;  ///< fraction of consolidated models that are stable
    double prediction_mse = 0.0;
    double runtime_ms = 0.0;
    std::string status = "ok";  ///< "ok" or the error message
    bool ok() const { return status == "ok"; }
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;  ///< ordered by (cell, seed)
    /// Least-squares slope of log(median est_error) against log(D) over the
    /// distinct D values of successful rows; unset with fewer than two.
    std::optional<double> slope;
    std::size_t failed_rows() const;
};

/// Simulates, fits and evaluates every (cell, seed) pair on up to `workers`
/// threads (0 = all cores). Row errors are recorded, not thrown. A holdout
/// of the same length is simulated for the prediction error.
ExperimentReport run_experiment(const RunConfig& config, unsigned workers = 0);

/// Seed of series m in cell `cell` for replicate `seed`; the holdout of
/// series m uses stream M + m.
std::uint64_t series_seed(std::uint64_t seed, std::size_t cell, std::size_t stream);

/// Header, one line per row, then a summary line whose `slope` column is
/// filled. Deterministic apart from runtime_ms.
std::string report_csv(const ExperimentReport& report);
nlohmann::json report_json(const ExperimentReport& report);

} // namespace hierlag::harness
