#include "maxev/core.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

namespace maxev {

std::size_t SampleSet::min_sample_count() const {
    std::size_t n = std::numeric_limits<std::size_t>::max();
    for (const auto& v : variables) n = std::min(n, v.size());
    return n;
}

void SampleSet::validate() const {
    if (variables.empty()) {
        throw std::invalid_argument("SampleSet: need at least one variable");
    }
    for (std::size_t i = 0; i < variables.size(); ++i) {
        if (variables[i].empty()) {
            throw std::invalid_argument("SampleSet: variable " + std::to_string(i) +
                                        " has no samples");
        }
    }
}

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::MaxEstimator: return "me";
        case EstimatorKind::LowBiasCv: return "lbcv";
        case EstimatorKind::LowVarianceCv: return "lvcv";
        case EstimatorKind::Bayes: return "be";
    }
    return "?";
}

CvVariant EstimatorSpec::cv_variant() const {
    if (kind == EstimatorKind::LowBiasCv) return CvVariant::LowBias;
    if (kind == EstimatorKind::LowVarianceCv) return CvVariant::LowVariance;
    throw std::logic_error("cv_variant: estimator is not a CV kind");
}

void EstimatorSpec::validate() const {
    if (is_cv() && fold_count < 2) {
        throw std::invalid_argument("EstimatorSpec: CV fold count must be at least 2");
    }
    if (kind == EstimatorKind::Bayes && (prior_alpha <= 0.0 || prior_beta <= 0.0)) {
        throw std::invalid_argument("EstimatorSpec: Beta prior parameters must be positive");
    }
}

EstimatorSpec EstimatorSpec::me() { return {}; }

EstimatorSpec EstimatorSpec::lbcv(std::size_t k, std::optional<std::uint64_t> seed) {
    EstimatorSpec s;
    s.kind = EstimatorKind::LowBiasCv;
    s.fold_count = k;
    s.fold_seed = seed;
    return s;
}

EstimatorSpec EstimatorSpec::lvcv(std::size_t k, std::optional<std::uint64_t> seed) {
    EstimatorSpec s;
    s.kind = EstimatorKind::LowVarianceCv;
    s.fold_count = k;
    s.fold_seed = seed;
    return s;
}

EstimatorSpec EstimatorSpec::be(double alpha, double beta) {
    EstimatorSpec s;
    s.kind = EstimatorKind::Bayes;
    s.prior_alpha = alpha;
    s.prior_beta = beta;
    return s;
}

std::vector<std::vector<std::size_t>> FoldPartition::fold_sizes() const {
    std::vector<std::vector<std::size_t>> sizes(
        fold_count, std::vector<std::size_t>(assignment.size(), 0));
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        for (std::uint32_t k : assignment[i]) ++sizes[k][i];
    }
    return sizes;
}

double sample_mean(std::span<const double> samples) {
    if (samples.empty()) {
        throw std::invalid_argument("sample_mean: empty sample list");
    }
    CompensatedSum acc;
    for (double x : samples) acc.add(x);
    return acc.value() / static_cast<double>(samples.size());
}

IndexSet maximal_indices(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("maximal_indices: empty value list");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw std::invalid_argument("maximal_indices: non-finite value at index " +
                                        std::to_string(i));
        }
    }
    const double top = *std::max_element(values.begin(), values.end());
    IndexSet out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == top) out.push_back(i);
    }
    return out;
}

Estimate max_estimator(const SampleSet& x) {
    x.validate();
    std::vector<double> means(x.variable_count());
    for (std::size_t i = 0; i < x.variable_count(); ++i) {
        means[i] = sample_mean(x.variables[i]);
    }
    Estimate est;
    est.maximal_sets.push_back(maximal_indices(means));
    est.value = means[est.maximal_sets.front().front()];
    return est;
}

namespace {

// Fisher-Yates with explicit rejection sampling so the permutation sequence
// is identical on every platform.
std::uint64_t bounded_uint(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % bound;
}

void shuffle_indices(std::vector<std::uint32_t>& order, std::mt19937_64& rng) {
    for (std::size_t j = order.size(); j > 1; --j) {
        const std::uint64_t r = bounded_uint(rng, j);
        std::swap(order[j - 1], order[r]);
    }
}

}  // namespace

FoldPartition partition_folds(const SampleSet& x, std::size_t fold_count,
                              std::optional<std::uint64_t> fold_seed) {
    x.validate();
    if (fold_count < 2) {
        throw std::invalid_argument("partition_folds: fold count must be at least 2");
    }
    for (std::size_t i = 0; i < x.variable_count(); ++i) {
        if (fold_count > x.sample_count(i)) {
            throw std::invalid_argument(
                "partition_folds: fold count " + std::to_string(fold_count) +
                " exceeds the " + std::to_string(x.sample_count(i)) +
                " samples of variable " + std::to_string(i));
        }
    }

    FoldPartition part;
    part.fold_count = fold_count;
    part.assignment.resize(x.variable_count());

    std::optional<std::mt19937_64> rng;
    if (fold_seed) rng.emplace(*fold_seed);

    for (std::size_t i = 0; i < x.variable_count(); ++i) {
        const std::size_t n = x.sample_count(i);
        auto& assign = part.assignment[i];
        assign.resize(n);
        if (!rng) {
            for (std::size_t j = 0; j < n; ++j) {
                assign[j] = static_cast<std::uint32_t>(j % fold_count);
            }
        } else {
            std::vector<std::uint32_t> order(n);
            for (std::size_t j = 0; j < n; ++j) order[j] = static_cast<std::uint32_t>(j);
            shuffle_indices(order, *rng);
            for (std::size_t j = 0; j < n; ++j) {
                assign[order[j]] = static_cast<std::uint32_t>(j % fold_count);
            }
        }
    }
    return part;
}

namespace {

void check_partition(const SampleSet& x, const FoldPartition& folds) {
    if (folds.fold_count < 2) {
        throw std::invalid_argument("cv estimator: fold count must be at least 2");
    }
    if (folds.variable_count() != x.variable_count()) {
        throw std::invalid_argument("cv estimator: partition/sample-set variable mismatch");
    }
    for (std::size_t i = 0; i < x.variable_count(); ++i) {
        if (folds.assignment[i].size() != x.sample_count(i)) {
            throw std::invalid_argument("cv estimator: partition does not cover variable " +
                                        std::to_string(i));
        }
    }
}

// Shared CV computation. Per fold k the argument vector picks the maximal
// index set and the value vector prices it; fold values
// are produced in one pass so that the estimator (their average) and the
// per-fold diagnostics are always consistent.
//
// Outside-of-fold means come from prefix/suffix sums of the per-fold
// compensated sums; for K=2 the "outside" sum is the other fold's sum
// exactly, which keeps 2-fold LBCV and LVCV bit-identical.
double cv_all_folds(const SampleSet& x, const FoldPartition& folds, CvVariant variant,
                    CvScratch& s, std::vector<IndexSet>* sets,
                    std::vector<double>* fold_values_out) {
    x.validate();
    check_partition(x, folds);

    const std::size_t m = x.variable_count();
    const std::size_t kfolds = folds.fold_count;

    s.fold_sums.assign(m * kfolds, CompensatedSum{});
    s.fold_counts.assign(m * kfolds, 0);
    s.outside_sum.resize(m * kfolds);
    s.argument.resize(m);
    s.value.resize(m);
    s.fold_values.resize(kfolds);

    for (std::size_t i = 0; i < m; ++i) {
        const auto& samples = x.variables[i];
        const auto& assign = folds.assignment[i];
        CompensatedSum* sums = s.fold_sums.data() + i * kfolds;
        std::size_t* counts = s.fold_counts.data() + i * kfolds;
        for (std::size_t j = 0; j < samples.size(); ++j) {
            sums[assign[j]].add(samples[j]);
            ++counts[assign[j]];
        }
        for (std::size_t k = 0; k < kfolds; ++k) {
            if (counts[k] == 0) {
                throw std::invalid_argument("cv estimator: fold " + std::to_string(k) +
                                            " is empty for variable " + std::to_string(i));
            }
        }
        // outside_sum[k] = sum of all fold sums except fold k
        double* outside = s.outside_sum.data() + i * kfolds;
        CompensatedSum prefix;
        for (std::size_t k = 0; k < kfolds; ++k) {
            outside[k] = prefix.value();
            prefix.add(sums[k].value());
        }
        CompensatedSum suffix;
        for (std::size_t k = kfolds; k-- > 0;) {
            outside[k] += suffix.value();
            suffix.add(sums[k].value());
        }
    }

    if (sets) {
        sets->clear();
        sets->reserve(kfolds);
    }

    CompensatedSum total;
    for (std::size_t k = 0; k < kfolds; ++k) {
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t inside_n = s.fold_counts[i * kfolds + k];
            const std::size_t outside_n = x.sample_count(i) - inside_n;
            const double inside = s.fold_sums[i * kfolds + k].value() /
                                  static_cast<double>(inside_n);
            const double outside = s.outside_sum[i * kfolds + k] /
                                   static_cast<double>(outside_n);
            if (variant == CvVariant::LowBias) {
                s.argument[i] = outside;
                s.value[i] = inside;
            } else {
                s.argument[i] = inside;
                s.value[i] = outside;
            }
        }
        const double top = [&] {
            double t = s.argument[0];
            for (std::size_t i = 1; i < m; ++i) t = std::max(t, s.argument[i]);
            if (!std::isfinite(t)) {
                throw std::invalid_argument("cv estimator: non-finite argument value");
            }
            return t;
        }();
        CompensatedSum picked;
        std::size_t picked_count = 0;
        IndexSet maximal;
        for (std::size_t i = 0; i < m; ++i) {
            if (s.argument[i] == top) {
                picked.add(s.value[i]);
                ++picked_count;
                if (sets) maximal.push_back(i);
            }
        }
        s.fold_values[k] = picked.value() / static_cast<double>(picked_count);
        total.add(s.fold_values[k]);
        if (sets) sets->push_back(std::move(maximal));
    }
    if (fold_values_out) *fold_values_out = s.fold_values;
    return total.value() / static_cast<double>(kfolds);
}

}  // namespace

std::pair<double, IndexSet> cv_fold_estimate(const SampleSet& x, const FoldPartition& folds,
                                             std::size_t fold, CvVariant variant) {
    if (fold >= folds.fold_count) {
        throw std::out_of_range("cv_fold_estimate: fold index " + std::to_string(fold) +
                                " out of range for " + std::to_string(folds.fold_count) +
                                " folds");
    }
    CvScratch scratch;
    std::vector<IndexSet> sets;
    std::vector<double> fold_values;
    cv_all_folds(x, folds, variant, scratch, &sets, &fold_values);
    return {fold_values[fold], std::move(sets[fold])};
}

Estimate cv_estimator(const SampleSet& x, const FoldPartition& folds, CvVariant variant) {
    CvScratch scratch;
    Estimate est;
    est.value = cv_all_folds(x, folds, variant, scratch, &est.maximal_sets, nullptr);
    return est;
}

Estimate cv_estimator(const SampleSet& x, const EstimatorSpec& spec) {
    spec.validate();
    if (!spec.is_cv()) {
        throw std::invalid_argument("cv_estimator: spec is not a CV estimator");
    }
    return cv_estimator(x, partition_folds(x, spec.fold_count, spec.fold_seed),
                        spec.cv_variant());
}

double cv_value(const SampleSet& x, const FoldPartition& folds, CvVariant variant,
                CvScratch& scratch) {
    return cv_all_folds(x, folds, variant, scratch, nullptr, nullptr);
}

double cv_value(const SampleSet& x, const FoldPartition& folds, CvVariant variant) {
    CvScratch scratch;
    return cv_value(x, folds, variant, scratch);
}

}  // namespace maxev
