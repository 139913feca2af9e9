#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hierlag/pipeline.hpp"

namespace hierlag::harness {

inline constexpr int kSchemaVersion = 1;

/// True coefficients and noise levels of a simulated dataset. A single
/// entry is shared by every series.
struct Truth {
    std::vector<std::vector<double>> coeffs;
    std::vector<double> sigma;
};

nlohmann::json to_json(const StabilityReport& report);
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const Truth& truth);

/// Inverse of to_json. The per-iteration objective history is not stored;
/// the trace comes back with only its final objective value.
FitResult fit_result_from_json(const nlohmann::json& j);
Truth truth_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const nlohmann::json& j, const std::string& path);

} // namespace hierlag::harness
