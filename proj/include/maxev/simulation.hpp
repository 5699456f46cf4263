// Seeded Monte Carlo harness: draws replicated sample sets from configured
// distributions, evaluates every estimator on the identical data (common
// random numbers), and reports the bias/variance/RMSE decomposition.
// Replications are hashed to independent child seeds and reduced in fixed
// block order, so reports are bit-identical for any worker-thread count.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "maxev/core.hpp"

namespace maxev::sim {

struct DistributionSpec {
    enum class Kind { Bernoulli, Gaussian, PointMass };
    Kind kind = Kind::PointMass;
    double param_a = 0.0;  // Bernoulli: p; Gaussian: mean; PointMass: value
    double param_b = 0.0;  // Gaussian: variance

    static DistributionSpec bernoulli(double p);
    static DistributionSpec gaussian(double mean, double variance);
    static DistributionSpec point_mass(double value);

    double mean() const;
    double variance() const;
    std::string to_string() const;
};

double true_max_mean(std::span<const DistributionSpec> distributions);

// splitmix64 stream member `index` of the stream seeded at `master`.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index);

double uniform01(std::mt19937_64& rng);          // [0, 1)
double standard_gaussian(std::mt19937_64& rng);  // Box-Muller
double draw(const DistributionSpec& dist, std::mt19937_64& rng);

struct EstimatorConfig {
    std::string label;
    EstimatorSpec spec;
};

struct ScenarioConfig {
    std::string scenario_id;
    std::vector<DistributionSpec> distributions;
    std::vector<std::size_t> samples_per_variable;
    std::vector<EstimatorConfig> estimators;
    std::size_t replications = 0;
    std::uint64_t master_seed = 0;
    std::vector<std::pair<std::string, std::string>> metadata;

    void validate() const;
};

struct EstimatorRow {
    std::string label;
    EstimatorKind kind = EstimatorKind::MaxEstimator;
    std::size_t fold_count = 0;  // 0 when the estimator has no folds
    std::string degree_set;      // regression benchmark only
    double mean_estimate = 0.0;
    double bias = 0.0;
    double variance = 0.0;  // across replications (population form)
    double rmse = 0.0;      // sqrt(bias^2 + variance)
    double standard_error = 0.0;  // sqrt(variance / replications)
};

struct MonteCarloReport {
    std::string report_kind;  // "simulation" or "regression"
    std::string scenario_id;
    std::uint64_t master_seed = 0;
    std::size_t replications = 0;
    std::size_t variable_count = 0;
    double true_max = 0.0;
    std::vector<EstimatorRow> estimators;
    std::vector<std::pair<std::string, std::string>> metadata;
};

// Streaming mean/variance accumulator with an order-fixed merge.
struct MeanVarAccumulator {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const MeanVarAccumulator& other);
    double variance() const { return count == 0 ? 0.0 : m2 / static_cast<double>(count); }
};

inline constexpr std::uint64_t kDefaultMasterSeed = 20120601;

// threads == 0 picks the hardware concurrency; the thread count never
// changes the report.
MonteCarloReport run_monte_carlo(const ScenarioConfig& config, unsigned threads = 0);

// The two ad-click settings: setting 1 has M identical Bernoulli(0.5)
// variables and 100,000 total samples; setting 2 spreads the means evenly
// over [0.02, 0.05] with 300,000 total samples. Eight estimators: ME, then
// LVCV (leave-one-out, 10, 5 folds), 2-fold CV, LBCV (5, 10, leave-one-out).
ScenarioConfig ads_scenario(int setting, std::size_t variables,
                            std::size_t replications = 2000,
                            std::uint64_t master_seed = kDefaultMasterSeed);

}  // namespace maxev::sim
