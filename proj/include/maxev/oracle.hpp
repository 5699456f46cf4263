// Exact expectation of an estimator over all outcomes of a small Bernoulli
// instance, by full enumeration in rational arithmetic. Ground truth for
// every bias claim: the estimators are re-evaluated here from scratch on
// exact fractions, independently of the floating-point implementations.
#pragma once

#include <cstdint>
#include <vector>

#include "maxev/bayes.hpp"
#include "maxev/core.hpp"

namespace maxev::oracle {

// M Bernoulli variables with exact rational success probabilities, n samples
// each. Folds are always deterministic round-robin (sample j -> fold j mod K).
struct DiscreteInstance {
    std::vector<Rational> means;
    std::size_t samples_per_variable = 0;

    std::size_t variable_count() const { return means.size(); }
    // 2^(M n); enumeration is capped at 2^26 outcomes.
    std::uint64_t outcome_count() const;
    void validate() const;
};

Rational true_max(const DiscreteInstance& instance);

// sum over outcomes of P(outcome) * estimator(outcome).
Rational enumerate_expected_value(const DiscreteInstance& instance, const EstimatorSpec& spec);

// enumerate_expected_value minus max_i p_i.
Rational exact_bias(const DiscreteInstance& instance, const EstimatorSpec& spec);

// Selection weights w^k_i = E[ indicator(i in M^k) / |M^k| ] for a CV
// estimator; sums to one exactly.
std::vector<Rational> selection_weights(const DiscreteInstance& instance,
                                        const EstimatorSpec& spec, std::size_t fold);

// Full outcome table for reporting on small instances: per-variable sample
// bitmasks (bit j = sample j), outcome probability, estimator value.
struct OutcomeRow {
    std::vector<std::uint32_t> masks;
    Rational probability;
    Rational value;
};
std::vector<OutcomeRow> outcome_table(const DiscreteInstance& instance,
                                      const EstimatorSpec& spec);

}  // namespace maxev::oracle
