#include "hierlag/harness/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "hierlag/errors.hpp"

namespace hierlag::harness {

using nlohmann::json;

namespace {

void check_schema(const json& j, const char* what) {
    if (!j.is_object()) throw Error(Errc::InvalidArgument, std::string(what) + " must be a JSON object");
    const int v = j.value("schema_version", -1);
    if (v != kSchemaVersion) {
        throw Error(Errc::InvalidArgument, std::string(what) + ": unsupported schema_version " + std::to_string(v));
    }
}

StabilityReport stability_from_json(const json& j) {
    StabilityReport r;
    r.min_modulus = j.at("min_modulus").get<double>();
    r.max_modulus = j.at("max_modulus").get<double>();
    r.spectral_radius = j.at("spectral_radius").get<double>();
    r.is_stable = j.at("is_stable").get<bool>();
    r.epsilon_certified = j.at("epsilon_certified").get<double>();
    return r;
}

} // namespace

json to_json(const StabilityReport& report) {
    return {{"min_modulus", report.min_modulus},
            {"max_modulus", report.max_modulus},
            {"spectral_radius", report.spectral_radius},
            {"is_stable", report.is_stable},
            {"epsilon_certified", report.epsilon_certified}};
}

json to_json(const FitResult& fit) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["num_series"] = fit.num_series;
    j["L_input"] = fit.L_input;
    j["beta_hat"] = std::vector<double>(fit.beta_hat.data(), fit.beta_hat.data() + fit.beta_hat.size());
    j["lambda_used"] = fit.lambda_used;
    j["lambda_source"] = fit.lambda_source;
    j["sigma_max_used"] = fit.sigma_max_used;
    j["mode"] = to_string(fit.mode);
    j["L0_hat"] = fit.L0_hat;
    j["beta_tilde"] = fit.beta_tilde;
    j["stability"] = json::array();
    for (const auto& s : fit.stability) j["stability"].push_back(to_json(s));
    j["trace"] = {{"iters_used", fit.trace.iters_used},
                  {"converged", fit.trace.converged},
                  {"fixed_point_residual", fit.trace.fixed_point_residual},
                  {"step", fit.trace.step},
                  {"final_objective",
                   fit.trace.objective_per_iter.empty() ? json(nullptr) : json(fit.trace.objective_per_iter.back())}};
    if (fit.cv) {
        j["cv"] = {{"lambdas", fit.cv->lambdas},
                   {"mean_error", fit.cv->mean_error},
                   {"std_error", fit.cv->std_error},
                   {"best_index", fit.cv->best_index},
                   {"chosen_index", fit.cv->chosen_index},
                   {"lambda_max", fit.cv->lambda_max}};
    }
    return j;
}

json to_json(const Truth& truth) {
    return {{"schema_version", kSchemaVersion}, {"coeffs", truth.coeffs}, {"sigma", truth.sigma}};
}

FitResult fit_result_from_json(const json& j) {
    check_schema(j, "fit result");
    try {
        FitResult f;
        f.num_series = j.at("num_series").get<std::size_t>();
        f.L_input = j.at("L_input").get<std::size_t>();
        const auto beta = j.at("beta_hat").get<std::vector<double>>();
        if (beta.size() != f.num_series * f.L_input) {
            throw Error(Errc::DimensionMismatch, "beta_hat length does not equal num_series * L_input");
        }
        f.beta_hat = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
        f.lambda_used = j.at("lambda_used").get<double>();
        f.lambda_source = j.at("lambda_source").get<std::string>();
        f.sigma_max_used = j.at("sigma_max_used").get<double>();
        f.mode = pooling_mode_from_string(j.at("mode").get<std::string>());
        f.L0_hat = j.at("L0_hat").get<std::size_t>();
        f.beta_tilde = j.at("beta_tilde").get<std::vector<std::vector<double>>>();
        for (const auto& s : j.at("stability")) f.stability.push_back(stability_from_json(s));
        const auto& t = j.at("trace");
        f.trace.iters_used = t.at("iters_used").get<int>();
        f.trace.converged = t.at("converged").get<bool>();
        f.trace.fixed_point_residual = t.at("fixed_point_residual").get<double>();
        f.trace.step = t.at("step").get<double>();
        if (!t.at("final_objective").is_null()) f.trace.objective_per_iter = {t["final_objective"].get<double>()};
        if (j.contains("cv")) {
            const auto& c = j["cv"];
            CrossValidationResult cv;
            cv.lambdas = c.at("lambdas").get<std::vector<double>>();
            cv.mean_error = c.at("mean_error").get<std::vector<double>>();
            cv.std_error = c.at("std_error").get<std::vector<double>>();
            cv.best_index = c.at("best_index").get<std::size_t>();
            cv.chosen_index = c.at("chosen_index").get<std::size_t>();
            cv.lambda_max = c.at("lambda_max").get<double>();
            f.cv = std::move(cv);
        }
        return f;
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("fit result: ") + e.what());
    }
}

Truth truth_from_json(const json& j) {
    check_schema(j, "truth");
    try {
        Truth t;
        t.coeffs = j.at("coeffs").get<std::vector<std::vector<double>>>();
        t.sigma = j.value("sigma", std::vector<double>{});
        if (t.coeffs.empty()) throw Error(Errc::InvalidArgument, "truth: coeffs is empty");
        return t;
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("truth: ") + e.what());
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidArgument, "cannot open " + path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = text.begin() + static_cast<std::ptrdiff_t>(std::min(e.byte, text.size()));
        const auto line = static_cast<std::size_t>(std::count(text.begin(), upto, '\n')) + 1;
        throw ParseError(path, line, e.what());
    }
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw Error(Errc::InvalidArgument, "write failed for " + path);
}

} // namespace hierlag::harness
