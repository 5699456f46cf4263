// Polynomial model-selection benchmark: noisy samples of a fixed target
// function, least-squares polynomial fits, per-model scores from an inner
// leave-one-out CV loop, and the outer ME/LBCV/LVCV estimators of the best
// model's negative test MSE.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "maxev/core.hpp"
#include "maxev/simulation.hpp"

namespace maxev::regress {

// r(y) = 4 (sin y + sin 2y)
double target_function(double y);

struct RegressionDataset {
    std::vector<double> inputs;
    std::vector<double> values;

    std::size_t size() const { return inputs.size(); }
};

// The 81 equidistant inputs 0, 0.05, ..., 4.
std::vector<double> canonical_inputs();

// Canonical grid with independent zero-mean Gaussian noise of the given
// variance added to r(y); deterministic for a fixed seed.
RegressionDataset generate_dataset(std::uint64_t seed, double noise_variance = 4.0);
RegressionDataset generate_dataset(std::mt19937_64& rng, double noise_variance = 4.0);

// Least-squares polynomial in a basis rescaled to [-1, 1] over the fitted
// input range (QR factorization; inputs must not all coincide).
struct PolynomialModel {
    std::size_t degree = 0;
    std::vector<double> coefficients;  // ascending powers of the scaled input
    double input_low = -1.0;
    double input_high = 1.0;

    double evaluate(double y) const;
};

PolynomialModel fit_polynomial(const RegressionDataset& data, std::size_t degree);

// Negated leave-one-out mean squared error of degree-i fits over Z:
// for each point, fit on the rest and square the held-out residual.
// Requires |Z| >= degree + 2.
double inner_cv_score(const RegressionDataset& z, std::size_t degree);

// ME/CV combination rules on top of the model scores. Argument vectors are
// inner_cv_score over the designated subsets (the full set for ME, the
// fold complement for LBCV, the fold for LVCV); the value of a selected
// model is its negated held-out MSE: fit on the argument subset, test on
// that subset's complement. Fold feasibility is checked for every degree
// before any fitting.
Estimate outer_estimate(const RegressionDataset& data, std::span<const std::size_t> degrees,
                        const EstimatorSpec& spec);

struct GroundTruthResult {
    std::vector<std::size_t> degrees;
    std::vector<double> values;           // mu_i = -E[test MSE]
    std::vector<double> standard_errors;
    std::size_t best_degree() const;
    double best_value() const;
};

// Monte Carlo ground truth: per replication fit each degree on a fresh
// noisy 81-point set and test on an independent fresh one.
GroundTruthResult ground_truth_model_values(std::span<const std::size_t> degrees,
                                            std::size_t replications, std::uint64_t seed,
                                            unsigned threads = 0);

struct RegressionEstimatorConfig {
    std::string label;
    EstimatorSpec spec;
    std::vector<std::size_t> degrees;  // empty: use the scenario default
};

struct RegressionConfig {
    std::string scenario_id = "regression";
    std::vector<std::size_t> degrees;  // default candidate set
    std::vector<RegressionEstimatorConfig> estimators;
    std::size_t datasets = 1000;
    std::uint64_t master_seed = sim::kDefaultMasterSeed;
    std::size_t ground_truth_replications = 100000;
    double noise_variance = 4.0;
};

// The benchmark configuration: degrees 1..9, ME, LBCV K in {2,3,9,81},
// LVCV K in {2,3,9}. LVCV with K = 9 runs with degrees capped to 1..7 (the
// largest feasible inner-fit degree on 9-point folds; its boundary fits are
// interpolations and are flagged in the report metadata).
RegressionConfig canonical_regression_config(std::size_t datasets = 1000,
                                             std::uint64_t master_seed = sim::kDefaultMasterSeed);

sim::MonteCarloReport run_regression(const RegressionConfig& config, unsigned threads = 0);

}  // namespace maxev::regress
