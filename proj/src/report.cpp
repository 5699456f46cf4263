#include "maxev/report.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace maxev::report {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

EstimatorKind kind_from_string(const std::string& s) {
    if (s == "me") return EstimatorKind::MaxEstimator;
    if (s == "lbcv") return EstimatorKind::LowBiasCv;
    if (s == "lvcv") return EstimatorKind::LowVarianceCv;
    if (s == "be") return EstimatorKind::Bayes;
    throw std::invalid_argument("report: unknown estimator kind '" + s + "'");
}

}  // namespace

nlohmann::ordered_json to_json(const sim::MonteCarloReport& report) {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["kind"] = report.report_kind;
    j["scenario_id"] = report.scenario_id;
    j["master_seed"] = report.master_seed;
    j["replications"] = report.replications;
    j["variable_count"] = report.variable_count;
    j["true_max"] = report.true_max;
    auto meta = nlohmann::ordered_json::array();
    for (const auto& [key, value] : report.metadata) {
        meta.push_back(nlohmann::ordered_json::array({key, value}));
    }
    j["metadata"] = std::move(meta);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : report.estimators) {
        nlohmann::ordered_json r;
        r["label"] = row.label;
        r["kind"] = to_string(row.kind);
        r["k"] = row.fold_count;
        if (report.report_kind == "regression") r["degree_set"] = row.degree_set;
        r["mean_estimate"] = row.mean_estimate;
        r["bias"] = row.bias;
        r["variance"] = row.variance;
        r["rmse"] = row.rmse;
        r["se"] = row.standard_error;
        rows.push_back(std::move(r));
    }
    j["estimators"] = std::move(rows);
    return j;
}

sim::MonteCarloReport from_json(const nlohmann::ordered_json& j) {
    sim::MonteCarloReport report;
    report.report_kind = j.at("kind").get<std::string>();
    report.scenario_id = j.at("scenario_id").get<std::string>();
    report.master_seed = j.at("master_seed").get<std::uint64_t>();
    report.replications = j.at("replications").get<std::size_t>();
    report.variable_count = j.at("variable_count").get<std::size_t>();
    report.true_max = j.at("true_max").get<double>();
    for (const auto& kv : j.at("metadata")) {
        report.metadata.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    }
    for (const auto& r : j.at("estimators")) {
        sim::EstimatorRow row;
        row.label = r.at("label").get<std::string>();
        row.kind = kind_from_string(r.at("kind").get<std::string>());
        row.fold_count = r.at("k").get<std::size_t>();
        if (r.contains("degree_set")) row.degree_set = r.at("degree_set").get<std::string>();
        row.mean_estimate = r.at("mean_estimate").get<double>();
        row.bias = r.at("bias").get<double>();
        row.variance = r.at("variance").get<double>();
        row.rmse = r.at("rmse").get<double>();
        row.standard_error = r.at("se").get<double>();
        report.estimators.push_back(std::move(row));
    }
    return report;
}

std::string to_json_text(const sim::MonteCarloReport& report) {
    return to_json(report).dump(2) + "\n";
}

sim::MonteCarloReport parse_json_text(const std::string& text) {
    return from_json(nlohmann::ordered_json::parse(text));
}

std::string to_csv(const sim::MonteCarloReport& report) {
    const bool regression = report.report_kind == "regression";
    std::string out = regression
        ? "scenario_id,estimator,K,degree_set,bias,variance,rmse,se,replications,seed\n"
        : "scenario_id,estimator,K,M,bias,variance,rmse,se,replications,seed\n";
    for (const auto& row : report.estimators) {
        out += report.scenario_id;
        out += ',';
        out += row.label;
        out += ',';
        out += std::to_string(row.fold_count);
        out += ',';
        out += regression ? row.degree_set : std::to_string(report.variable_count);
        out += ',';
        out += format_double(row.bias);
        out += ',';
        out += format_double(row.variance);
        out += ',';
        out += format_double(row.rmse);
        out += ',';
        out += format_double(row.standard_error);
        out += ',';
        out += std::to_string(report.replications);
        out += ',';
        out += std::to_string(report.master_seed);
        out += '\n';
    }
    return out;
}

std::string plot_data_csv(const sim::MonteCarloReport& report) {
    std::string out = "scenario_id,estimator,component,share\n";
    for (const auto& row : report.estimators) {
        const double rmse2 = row.rmse * row.rmse;
        const double bias_share = rmse2 > 0.0 ? row.bias * row.bias / rmse2 : 0.0;
        const double var_share = rmse2 > 0.0 ? row.variance / rmse2 : 0.0;
        out += report.scenario_id + "," + row.label + ",bias," + format_double(bias_share) + "\n";
        out += report.scenario_id + "," + row.label + ",variance," + format_double(var_share) +
               "\n";
    }
    return out;
}

std::string human_table(const sim::MonteCarloReport& report) {
    std::ostringstream os;
    os << "scenario " << report.scenario_id << "  (R = " << report.replications
       << ", seed = " << report.master_seed << ")\n";
    os << "true maximum expected value: " << format_double(report.true_max) << "\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %6s %14s %14s %14s %14s\n", "estimator", "K",
                  "bias", "variance", "rmse", "se");
    os << line;
    for (const auto& row : report.estimators) {
        std::snprintf(line, sizeof line, "%-10s %6zu %14.6g %14.6g %14.6g %14.6g\n",
                      row.label.c_str(), row.fold_count, row.bias, row.variance, row.rmse,
                      row.standard_error);
        os << line;
    }
    return os.str();
}

}  // namespace maxev::report
