// Bayesian estimator for the maximum expected value of Bernoulli variables
// under Beta priors: the expected maximum of the posterior beliefs, computed
// from the product CDF F_max(x) = prod_i F_i(x).
//
// With integer posterior parameters every per-variable CDF is a polynomial
// with integer coefficients, so E[max] = 1 - integral of the product is
// evaluated in exact rational arithmetic. Non-integer parameters fall back
// to fixed 128-node Gauss-Legendre quadrature.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <span>
#include <vector>

#include "maxev/core.hpp"

namespace maxev {
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
}  // namespace maxev

namespace maxev::bayes {

struct BetaPosterior {
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const;  // alpha > 0, beta > 0
    bool has_integer_parameters() const;
    double mean() const { return alpha / (alpha + beta); }
};

// Beta(alpha + ones, beta + total - ones).
BetaPosterior posterior_from_counts(std::size_t ones, std::size_t total,
                                    double prior_alpha, double prior_beta);

// CDF of a Beta(a, b) belief with integer parameters, as an exact polynomial
// on [0, 1] in ascending powers of x.
struct PolynomialCdf {
    std::vector<Rational> coefficients;

    Rational evaluate(const Rational& x) const;
    Rational integral01() const;  // integral over [0, 1]
    // P(0) = 0, P(1) = 1, and non-decreasing on an equispaced grid.
    bool is_valid_cdf(std::size_t grid_points = 1024) const;
};

PolynomialCdf cdf_polynomial(const BetaPosterior& posterior);

// Exact path cap on the degree of the product polynomial.
inline constexpr std::size_t kExactDegreeCap = 4096;

bool exact_path_applicable(std::span<const BetaPosterior> posteriors);

// E[max] = 1 - integral_0^1 prod_i F_i(x) dx, exactly. Requires integer
// parameters on every posterior.
Rational expected_max_exact(std::span<const BetaPosterior> posteriors);

// Same integral by fixed 128-node Gauss-Legendre quadrature over the product
// of regularized incomplete beta functions. Error <= 1e-12 for products of
// polynomial degree <= 256; used as the fallback for non-integer parameters.
double expected_max_quadrature(std::span<const BetaPosterior> posteriors);

// Dispatch: exact when all parameters are integers and the product degree is
// within the cap, quadrature otherwise.
double expected_max(std::span<const BetaPosterior> posteriors);

// Expected maximum of the posterior means for a set of {0,1} samples.
Estimate bayes_estimator(const SampleSet& x, double prior_alpha = 1.0,
                         double prior_beta = 1.0);

// Exact-rational variant used by the enumeration oracle (integer prior).
Rational bayes_estimator_exact(const SampleSet& x, long prior_alpha = 1,
                               long prior_beta = 1);

}  // namespace maxev::bayes
