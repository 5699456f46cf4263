#include "maxev/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace maxev::bounds {

VarianceProfile VarianceProfile::from_estimator_variances(std::vector<double> variances) {
    VarianceProfile p{std::move(variances)};
    p.validate();
    return p;
}

VarianceProfile VarianceProfile::from_sample_variances(std::span<const double> sigma2,
                                                       std::span<const std::size_t> counts) {
    if (sigma2.size() != counts.size()) {
        throw std::invalid_argument("VarianceProfile: sigma2/count length mismatch");
    }
    VarianceProfile p;
    p.per_variable_variance.reserve(sigma2.size());
    for (std::size_t i = 0; i < sigma2.size(); ++i) {
        if (counts[i] == 0) {
            throw std::invalid_argument("VarianceProfile: zero sample count for variable " +
                                        std::to_string(i));
        }
        p.per_variable_variance.push_back(sigma2[i] / static_cast<double>(counts[i]));
    }
    p.validate();
    return p;
}

void VarianceProfile::validate() const {
    if (per_variable_variance.empty()) {
        throw std::invalid_argument("VarianceProfile: need at least one variable");
    }
    for (std::size_t i = 0; i < per_variable_variance.size(); ++i) {
        const double v = per_variable_variance[i];
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("VarianceProfile: variance of variable " +
                                        std::to_string(i) + " must be finite and >= 0");
        }
    }
}

std::vector<std::vector<double>> fold_mean_variances(std::span<const double> sigma2,
                                                     const FoldPartition& folds) {
    if (sigma2.size() != folds.variable_count()) {
        throw std::invalid_argument("fold_mean_variances: sigma2/partition size mismatch");
    }
    const auto sizes = folds.fold_sizes();
    std::vector<std::vector<double>> out(folds.fold_count,
                                         std::vector<double>(sigma2.size()));
    for (std::size_t k = 0; k < folds.fold_count; ++k) {
        for (std::size_t i = 0; i < sigma2.size(); ++i) {
            out[k][i] = sigma2[i] / static_cast<double>(sizes[k][i]);
        }
    }
    return out;
}

std::vector<std::vector<double>> argument_variances(std::span<const double> sigma2,
                                                    const FoldPartition& folds,
                                                    CvVariant variant) {
    if (sigma2.size() != folds.variable_count()) {
        throw std::invalid_argument("argument_variances: sigma2/partition size mismatch");
    }
    const auto sizes = folds.fold_sizes();
    std::vector<std::vector<double>> out(folds.fold_count,
                                         std::vector<double>(sigma2.size()));
    for (std::size_t k = 0; k < folds.fold_count; ++k) {
        for (std::size_t i = 0; i < sigma2.size(); ++i) {
            const std::size_t total = folds.assignment[i].size();
            const std::size_t inside = sizes[k][i];
            const std::size_t basis =
                variant == CvVariant::LowBias ? total - inside : inside;
            out[k][i] = sigma2[i] / static_cast<double>(basis);
        }
    }
    return out;
}

double me_bias_upper_bound(const VarianceProfile& profile) {
    profile.validate();
    const double m = static_cast<double>(profile.per_variable_variance.size());
    CompensatedSum total;
    for (double v : profile.per_variable_variance) total.add(v);
    return std::sqrt((m - 1.0) / m * total.value());
}

double me_variance_bound(const VarianceProfile& profile) {
    profile.validate();
    CompensatedSum total;
    for (double v : profile.per_variable_variance) total.add(v);
    return total.value();
}

namespace {

void check_fold_matrix(const std::vector<std::vector<double>>& per_fold,
                       const char* what, std::size_t min_folds) {
    if (per_fold.size() < min_folds) {
        throw std::invalid_argument(std::string(what) + ": need at least " +
                                    std::to_string(min_folds) + " folds");
    }
    const std::size_t m = per_fold.front().size();
    for (const auto& row : per_fold) {
        if (row.empty() || row.size() != m) {
            throw std::invalid_argument(std::string(what) + ": ragged variance matrix");
        }
        for (double v : row) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument(std::string(what) +
                                            ": variances must be finite and >= 0");
            }
        }
    }
}

}  // namespace

double cv_variance_bound(const std::vector<std::vector<double>>& per_fold_variances) {
    check_fold_matrix(per_fold_variances, "cv_variance_bound", 2);
    const double k = static_cast<double>(per_fold_variances.size());
    CompensatedSum total;
    for (const auto& row : per_fold_variances) {
        for (double v : row) total.add(v);
    }
    return total.value() / (k * k);
}

double cv_variance_bound_equal_folds(const VarianceProfile& profile, std::size_t fold_count) {
    if (fold_count < 2) {
        throw std::invalid_argument("cv_variance_bound_equal_folds: need at least 2 folds");
    }
    return me_variance_bound(profile);
}

double cv_bias_lower_bound(const std::vector<std::vector<double>>& per_fold_argument_variances,
                           bool m2_tightening) {
    check_fold_matrix(per_fold_argument_variances, "cv_bias_lower_bound", 1);
    if (m2_tightening && per_fold_argument_variances.front().size() != 2) {
        throw std::invalid_argument(
            "cv_bias_lower_bound: the factor-1/2 tightening is proven for M = 2 only");
    }
    const double k = static_cast<double>(per_fold_argument_variances.size());
    CompensatedSum total;
    for (const auto& row : per_fold_argument_variances) {
        CompensatedSum fold;
        for (double v : row) fold.add(v);
        total.add(std::sqrt(fold.value()));
    }
    double bound = -total.value() / k;
    if (m2_tightening) bound *= 0.5;
    return bound;
}

}  // namespace maxev::bounds
