// Closed-form bias/variance bounds for the maximum estimator and the CV
// estimators, computable from analytic or plug-in variance profiles.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "maxev/core.hpp"

namespace maxev::bounds {

// Variances of the per-variable estimators mu_hat_i (one entry per variable).
struct VarianceProfile {
    std::vector<double> per_variable_variance;

    // Plug-in: the estimator variances directly.
    static VarianceProfile from_estimator_variances(std::vector<double> variances);
    // Analytic sample-average form: Var(mu_hat_i) = sigma2_i / n_i.
    static VarianceProfile from_sample_variances(std::span<const double> sigma2,
                                                 std::span<const std::size_t> counts);
    void validate() const;
};

// Per-fold estimator variances Var(mu_hat^k_i) or argument-set variances
// Var(a_hat^k_i), indexed [fold][variable], derived for sample averages
// from the per-sample variances and the actual fold sizes.
std::vector<std::vector<double>> fold_mean_variances(std::span<const double> sigma2,
                                                     const FoldPartition& folds);
std::vector<std::vector<double>> argument_variances(std::span<const double> sigma2,
                                                    const FoldPartition& folds,
                                                    CvVariant variant);

// Upper bound on the (non-negative) ME bias:
//   sqrt( (M-1)/M * sum_i Var(mu_hat_i) ).
double me_bias_upper_bound(const VarianceProfile& profile);

// Upper bound on the ME variance: sum_i Var(mu_hat_i).
double me_variance_bound(const VarianceProfile& profile);

// Upper bound on the CV variance from the per-fold estimator variances:
//   (1/K^2) sum_k sum_i Var(mu_hat^k_i).   Requires K >= 2.
double cv_variance_bound(const std::vector<std::vector<double>>& per_fold_variances);

// Equal-fold sample-average special case: the CV variance bound collapses
// to sum_i Var(mu_hat_i). Requires K >= 2.
double cv_variance_bound_equal_folds(const VarianceProfile& profile, std::size_t fold_count);

// Lower bound on the (non-positive) CV bias from the argument-set variances:
//   -(1/K) sum_k sqrt( sum_i Var(a_hat^k_i) ).
// The conjectured bound holds for any M; with m2_tightening (M = 2 only,
// where it is proven) the bound is multiplied by 1/2.
double cv_bias_lower_bound(const std::vector<std::vector<double>>& per_fold_argument_variances,
                           bool m2_tightening = false);

}  // namespace maxev::bounds
