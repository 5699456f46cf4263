#include "maxev/oracle.hpp"

#include <bit>
#include <functional>
#include <stdexcept>
#include <string>

namespace maxev::oracle {

namespace {

constexpr std::uint64_t kOutcomeCap = std::uint64_t{1} << 26;

long integer_prior(double x, const char* what) {
    if (x != std::floor(x) || x < 1.0) {
        throw std::invalid_argument(std::string(what) +
                                    ": oracle BE requires an integer prior >= 1");
    }
    return static_cast<long>(x);
}

// Everything precomputable for one (instance, estimator) pair.
struct Evaluator {
    const DiscreteInstance& inst;
    const EstimatorSpec& spec;
    std::size_t n;                 // samples per variable
    std::size_t m;                 // variables
    std::uint32_t outcomes;        // per-variable outcomes, 2^n
    std::vector<std::uint32_t> ones;                 // popcount per outcome
    std::vector<std::vector<Rational>> probability;  // [variable][outcome]

    // CV only
    std::size_t kfolds = 0;
    std::vector<std::uint32_t> fold_size;            // [fold]
    std::vector<std::vector<std::uint32_t>> fold_ones;  // [outcome][fold]

    // BE only
    long prior_alpha = 1, prior_beta = 1;
    std::vector<Rational> be_memo;   // by mixed-radix ones index
    std::vector<bool> be_known;

    Evaluator(const DiscreteInstance& instance, const EstimatorSpec& estimator)
        : inst(instance), spec(estimator) {
        inst.validate();
        spec.validate();
        n = inst.samples_per_variable;
        m = inst.variable_count();
        outcomes = std::uint32_t{1} << n;

        ones.resize(outcomes);
        for (std::uint32_t d = 0; d < outcomes; ++d) {
            ones[d] = static_cast<std::uint32_t>(std::popcount(d));
        }

        probability.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const Rational p = inst.means[i];
            const Rational q = Rational(1) - p;
            std::vector<Rational> ppow(n + 1), qpow(n + 1);
            ppow[0] = 1;
            qpow[0] = 1;
            for (std::size_t j = 1; j <= n; ++j) {
                ppow[j] = ppow[j - 1] * p;
                qpow[j] = qpow[j - 1] * q;
            }
            probability[i].resize(outcomes);
            for (std::uint32_t d = 0; d < outcomes; ++d) {
                probability[i][d] = ppow[ones[d]] * qpow[n - ones[d]];
            }
        }

        if (spec.is_cv()) {
            if (spec.fold_seed) {
                throw std::invalid_argument(
                    "oracle: only the deterministic round-robin fold scheme is supported");
            }
            kfolds = spec.fold_count;
            if (kfolds > n) {
                throw std::invalid_argument("oracle: fold count " + std::to_string(kfolds) +
                                            " exceeds the " + std::to_string(n) +
                                            " samples per variable");
            }
            fold_size.assign(kfolds, 0);
            for (std::size_t j = 0; j < n; ++j) ++fold_size[j % kfolds];
            fold_ones.assign(outcomes, std::vector<std::uint32_t>(kfolds, 0));
            for (std::uint32_t d = 0; d < outcomes; ++d) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (d & (std::uint32_t{1} << j)) ++fold_ones[d][j % kfolds];
                }
            }
        }

        if (spec.kind == EstimatorKind::Bayes) {
            prior_alpha = integer_prior(spec.prior_alpha, "oracle");
            prior_beta = integer_prior(spec.prior_beta, "oracle");
            std::size_t memo_size = 1;
            bool overflow = false;
            for (std::size_t i = 0; i < m; ++i) {
                if (memo_size > (std::size_t{1} << 22)) {
                    overflow = true;
                    break;
                }
                memo_size *= n + 1;
            }
            if (!overflow) {
                be_memo.resize(memo_size);
                be_known.assign(memo_size, false);
            }
        }
    }

    Rational value(const std::vector<std::uint32_t>& digits) {
        switch (spec.kind) {
            case EstimatorKind::MaxEstimator: {
                std::uint32_t best = 0;
                for (std::size_t i = 0; i < m; ++i) best = std::max(best, ones[digits[i]]);
                return Rational(best, n);
            }
            case EstimatorKind::LowBiasCv:
            case EstimatorKind::LowVarianceCv: {
                const bool low_bias = spec.kind == EstimatorKind::LowBiasCv;
                Rational total = 0;
                for (std::size_t k = 0; k < kfolds; ++k) {
                    const std::uint32_t inside_n = fold_size[k];
                    const std::uint32_t outside_n = static_cast<std::uint32_t>(n) - inside_n;
                    // Argument values share a denominator per fold, so the
                    // maximal set comes from integer numerators.
                    std::uint32_t best = 0;
                    bool first = true;
                    std::uint64_t value_sum = 0;
                    std::uint32_t count = 0;
                    for (std::size_t i = 0; i < m; ++i) {
                        const std::uint32_t inside = fold_ones[digits[i]][k];
                        const std::uint32_t outside = ones[digits[i]] - inside;
                        const std::uint32_t arg = low_bias ? outside : inside;
                        if (first || arg > best) {
                            best = arg;
                            first = false;
                            value_sum = 0;
                            count = 0;
                        }
                        if (arg == best) {
                            value_sum += low_bias ? inside : outside;
                            ++count;
                        }
                    }
                    const std::uint32_t value_den = low_bias ? inside_n : outside_n;
                    total += Rational(value_sum, std::uint64_t{value_den} * count);
                }
                return total / kfolds;
            }
            case EstimatorKind::Bayes: {
                std::size_t key = 0;
                if (!be_memo.empty()) {
                    for (std::size_t i = m; i-- > 0;) {
                        key = key * (n + 1) + ones[digits[i]];
                    }
                    if (be_known[key]) return be_memo[key];
                }
                std::vector<bayes::BetaPosterior> posteriors(m);
                for (std::size_t i = 0; i < m; ++i) {
                    posteriors[i].alpha = static_cast<double>(prior_alpha + ones[digits[i]]);
                    posteriors[i].beta =
                        static_cast<double>(prior_beta + (n - ones[digits[i]]));
                }
                Rational v = bayes::expected_max_exact(posteriors);
                if (!be_memo.empty()) {
                    be_memo[key] = v;
                    be_known[key] = true;
                }
                return v;
            }
        }
        throw std::logic_error("oracle: unknown estimator kind");
    }

    // Maximal set of fold k's argument vector, as a bitmask over variables.
    std::uint64_t maximal_mask(const std::vector<std::uint32_t>& digits, std::size_t k) const {
        const bool low_bias = spec.kind == EstimatorKind::LowBiasCv;
        std::uint32_t best = 0;
        bool first = true;
        std::uint64_t mask = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const std::uint32_t inside = fold_ones[digits[i]][k];
            const std::uint32_t arg = low_bias ? ones[digits[i]] - inside : inside;
            if (first || arg > best) {
                best = arg;
                first = false;
                mask = 0;
            }
            if (arg == best) mask |= std::uint64_t{1} << i;
        }
        return mask;
    }

    // Depth-first walk over the joint outcome space with running probability
    // products; visit(digits, probability) is called once per outcome.
    template <typename Visit>
    void enumerate(Visit&& visit) {
        std::vector<std::uint32_t> digits(m, 0);
        std::vector<Rational> partial(m + 1);
        partial[0] = 1;
        std::function<void(std::size_t)> walk = [&](std::size_t i) {
            if (i == m) {
                visit(digits, partial[m]);
                return;
            }
            for (std::uint32_t d = 0; d < outcomes; ++d) {
                digits[i] = d;
                partial[i + 1] = partial[i] * probability[i][d];
                walk(i + 1);
            }
        };
        walk(0);
    }
};

}  // namespace

std::uint64_t DiscreteInstance::outcome_count() const {
    const std::size_t bits = means.size() * samples_per_variable;
    if (bits >= 64) return std::uint64_t(-1);
    return std::uint64_t{1} << bits;
}

void DiscreteInstance::validate() const {
    if (means.empty()) {
        throw std::invalid_argument("DiscreteInstance: need at least one variable");
    }
    if (samples_per_variable == 0) {
        throw std::invalid_argument("DiscreteInstance: need at least one sample per variable");
    }
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (means[i] < 0 || means[i] > 1) {
            throw std::invalid_argument("DiscreteInstance: mean of variable " +
                                        std::to_string(i) + " outside [0, 1]");
        }
    }
    if (outcome_count() > kOutcomeCap) {
        throw std::domain_error(
            "DiscreteInstance: 2^(M*n) outcomes exceed the 2^26 enumeration cap; "
            "use the Monte Carlo harness instead");
    }
}

Rational true_max(const DiscreteInstance& instance) {
    instance.validate();
    Rational best = instance.means.front();
    for (const auto& p : instance.means) best = std::max(best, p);
    return best;
}

Rational enumerate_expected_value(const DiscreteInstance& instance, const EstimatorSpec& spec) {
    Evaluator eval(instance, spec);
    Rational expectation = 0;
    eval.enumerate([&](const std::vector<std::uint32_t>& digits, const Rational& prob) {
        if (prob != 0) expectation += prob * eval.value(digits);
    });
    return expectation;
}

Rational exact_bias(const DiscreteInstance& instance, const EstimatorSpec& spec) {
    return enumerate_expected_value(instance, spec) - true_max(instance);
}

std::vector<Rational> selection_weights(const DiscreteInstance& instance,
                                        const EstimatorSpec& spec, std::size_t fold) {
    if (spec.kind != EstimatorKind::LowBiasCv && spec.kind != EstimatorKind::LowVarianceCv) {
        throw std::invalid_argument("selection_weights: estimator must be a CV kind");
    }
    Evaluator eval(instance, spec);
    if (fold >= eval.kfolds) {
        throw std::out_of_range("selection_weights: fold index out of range");
    }
    std::vector<Rational> weights(instance.variable_count(), Rational(0));
    eval.enumerate([&](const std::vector<std::uint32_t>& digits, const Rational& prob) {
        if (prob == 0) return;
        const std::uint64_t mask = eval.maximal_mask(digits, fold);
        const int size = std::popcount(mask);
        const Rational share = prob / size;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (mask & (std::uint64_t{1} << i)) weights[i] += share;
        }
    });
    return weights;
}

std::vector<OutcomeRow> outcome_table(const DiscreteInstance& instance,
                                      const EstimatorSpec& spec) {
    Evaluator eval(instance, spec);
    if (instance.outcome_count() > 4096) {
        throw std::domain_error("outcome_table: table limited to 4096 outcomes");
    }
    std::vector<OutcomeRow> rows;
    rows.reserve(static_cast<std::size_t>(instance.outcome_count()));
    eval.enumerate([&](const std::vector<std::uint32_t>& digits, const Rational& prob) {
        rows.push_back(OutcomeRow{digits, prob, eval.value(digits)});
    });
    return rows;
}

}  // namespace maxev::oracle
