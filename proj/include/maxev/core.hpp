// Estimators for the maximum expected value of a set of random variables:
// the maximum of per-variable sample means and two K-fold cross-validation
// variants (low-bias and low-variance), plus the fold partitioning and
// index-set machinery they share.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace maxev {

// Running sum with Neumaier compensation. Keeps the accumulated error of a
// mean within a few ulp for up to ~1e6 addends.
struct CompensatedSum {
    double sum = 0.0;
    double compensation = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            compensation += (sum - t) + x;
        } else {
            compensation += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + compensation; }
};

// M sample lists, one per random variable. Counts per variable may differ.
struct SampleSet {
    std::vector<std::vector<double>> variables;

    std::size_t variable_count() const { return variables.size(); }
    std::size_t sample_count(std::size_t i) const { return variables[i].size(); }
    std::size_t min_sample_count() const;
    void validate() const;  // M >= 1 and every variable non-empty
};

// Sorted (ascending) set of variable indices.
using IndexSet = std::vector<std::size_t>;

enum class CvVariant { LowBias, LowVariance };

enum class EstimatorKind { MaxEstimator, LowBiasCv, LowVarianceCv, Bayes };

std::string to_string(EstimatorKind kind);

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::MaxEstimator;
    std::size_t fold_count = 0;                    // CV kinds only, >= 2
    double prior_alpha = 1.0;                      // Bayes kind only, > 0
    double prior_beta = 1.0;
    std::optional<std::uint64_t> fold_seed;        // none: deterministic round-robin

    bool is_cv() const {
        return kind == EstimatorKind::LowBiasCv || kind == EstimatorKind::LowVarianceCv;
    }
    CvVariant cv_variant() const;
    void validate() const;

    static EstimatorSpec me();
    static EstimatorSpec lbcv(std::size_t k, std::optional<std::uint64_t> seed = {});
    static EstimatorSpec lvcv(std::size_t k, std::optional<std::uint64_t> seed = {});
    static EstimatorSpec be(double alpha = 1.0, double beta = 1.0);
};

// Assignment of every sample of every variable to one of K folds. Balanced
// per variable: fold sizes differ by at most one, no fold is empty.
struct FoldPartition {
    std::size_t fold_count = 0;
    std::vector<std::vector<std::uint32_t>> assignment;  // [variable][sample] -> fold

    std::size_t variable_count() const { return assignment.size(); }
    // [fold][variable] -> number of samples of that variable in that fold
    std::vector<std::vector<std::size_t>> fold_sizes() const;
};

struct Estimate {
    double value = 0.0;
    // Diagnostics: the maximal index set of the argument vector, one entry
    // per fold for CV, a single entry for ME.
    std::vector<IndexSet> maximal_sets;
};

// Arithmetic mean with compensated summation. Throws on an empty list.
double sample_mean(std::span<const double> samples);

// All indices attaining max_j values[j]; ties by exact equality of the
// computed values. Throws on empty input or any non-finite value.
IndexSet maximal_indices(std::span<const double> values);

// value = max_i sample_mean(x_i)
Estimate max_estimator(const SampleSet& x);

// Round-robin fold assignment (sample j -> fold j mod K); with a seed, a
// seeded uniform shuffle of each variable's sample indices precedes the
// round-robin pass. Requires 2 <= K <= min_i N_i.
FoldPartition partition_folds(const SampleSet& x, std::size_t fold_count,
                              std::optional<std::uint64_t> fold_seed = {});

// One fold of the CV estimator: the per-fold value and the maximal index
// set of the argument vector for that fold.
std::pair<double, IndexSet> cv_fold_estimate(const SampleSet& x, const FoldPartition& folds,
                                             std::size_t fold, CvVariant variant);

// Average of the K per-fold values; maximal_sets holds all K fold sets.
Estimate cv_estimator(const SampleSet& x, const FoldPartition& folds, CvVariant variant);
Estimate cv_estimator(const SampleSet& x, const EstimatorSpec& spec);

// Reusable buffers for the value-only CV path (Monte Carlo inner loop).
struct CvScratch {
    std::vector<CompensatedSum> fold_sums;
    std::vector<std::size_t> fold_counts;
    std::vector<double> outside_sum;
    std::vector<double> argument;
    std::vector<double> value;
    std::vector<double> fold_values;
};

// Value-only CV estimate; bit-identical to cv_estimator(...).value.
double cv_value(const SampleSet& x, const FoldPartition& folds, CvVariant variant);
double cv_value(const SampleSet& x, const FoldPartition& folds, CvVariant variant,
                CvScratch& scratch);

}  // namespace maxev
