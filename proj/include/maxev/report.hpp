// Report serialization: canonical JSON (round-trips byte-identically), the
// flat CSV row schema, stacked-bar plot data, and a human-readable table.
#pragma once

#include <json.hpp>

#include <string>

#include "maxev/simulation.hpp"

namespace maxev::report {

inline constexpr const char* kToolVersion = "0.1.0";

// Reals are written with 17 significant digits, '.' decimal separator.
std::string format_double(double value);

nlohmann::ordered_json to_json(const sim::MonteCarloReport& report);
sim::MonteCarloReport from_json(const nlohmann::ordered_json& j);

std::string to_json_text(const sim::MonteCarloReport& report);
sim::MonteCarloReport parse_json_text(const std::string& text);

// simulation: scenario_id,estimator,K,M,bias,variance,rmse,se,replications,seed
// regression: scenario_id,estimator,K,degree_set,bias,variance,rmse,se,replications,seed
std::string to_csv(const sim::MonteCarloReport& report);

// Long format for stacked bias/variance bars: one row per estimator and
// component, share = bias^2/rmse^2 or variance/rmse^2.
std::string plot_data_csv(const sim::MonteCarloReport& report);

std::string human_table(const sim::MonteCarloReport& report);

}  // namespace maxev::report
