#include "maxev/regression.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace maxev::regress {

double target_function(double y) {
    return 4.0 * (std::sin(y) + std::sin(2.0 * y));
}

std::vector<double> canonical_inputs() {
    std::vector<double> inputs(81);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        inputs[i] = static_cast<double>(i) * 0.05;
    }
    return inputs;
}

RegressionDataset generate_dataset(std::mt19937_64& rng, double noise_variance) {
    if (!(noise_variance >= 0.0)) {
        throw std::invalid_argument("generate_dataset: noise variance must be >= 0");
    }
    RegressionDataset data;
    data.inputs = canonical_inputs();
    data.values.resize(data.inputs.size());
    const double sd = std::sqrt(noise_variance);
    for (std::size_t i = 0; i < data.inputs.size(); ++i) {
        data.values[i] = target_function(data.inputs[i]) + sd * sim::standard_gaussian(rng);
    }
    return data;
}

RegressionDataset generate_dataset(std::uint64_t seed, double noise_variance) {
    std::mt19937_64 rng(seed);
    return generate_dataset(rng, noise_variance);
}

double PolynomialModel::evaluate(double y) const {
    const double t = (2.0 * y - (input_high + input_low)) / (input_high - input_low);
    double acc = 0.0;
    for (std::size_t j = coefficients.size(); j-- > 0;) {
        acc = acc * t + coefficients[j];
    }
    return acc;
}

namespace {

struct FitResult {
    PolynomialModel model;
    Eigen::MatrixXd basis;       // m x (degree+1), scaled input powers
    Eigen::VectorXd residuals;   // values - basis * coefficients
    Eigen::MatrixXd thin_q;      // for leverages
};

void scaled_range(std::span<const double> inputs, double& lo, double& hi) {
    lo = inputs[0];
    hi = inputs[0];
    for (double y : inputs) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    if (lo == hi) {
        throw std::invalid_argument("fit_polynomial: inputs must not all be identical");
    }
}

FitResult fit_core(std::span<const double> inputs, std::span<const double> values,
                   std::size_t degree, bool want_leverages) {
    const std::size_t m = inputs.size();
    const std::size_t p = degree + 1;
    if (m < p) {
        throw std::invalid_argument("fit_polynomial: degree " + std::to_string(degree) +
                                    " needs at least " + std::to_string(p) + " points, got " +
                                    std::to_string(m));
    }
    FitResult fit;
    scaled_range(inputs, fit.model.input_low, fit.model.input_high);
    fit.model.degree = degree;

    fit.basis.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
    const double lo = fit.model.input_low, hi = fit.model.input_high;
    for (std::size_t r = 0; r < m; ++r) {
        const double t = (2.0 * inputs[r] - (hi + lo)) / (hi - lo);
        double power = 1.0;
        for (std::size_t c = 0; c < p; ++c) {
            fit.basis(r, c) = power;
            power *= t;
        }
    }
    Eigen::Map<const Eigen::VectorXd> rhs(values.data(), static_cast<Eigen::Index>(m));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fit.basis);
    Eigen::VectorXd coeffs = qr.solve(rhs);
    fit.model.coefficients.assign(coeffs.data(), coeffs.data() + p);
    fit.residuals = rhs - fit.basis * coeffs;
    if (want_leverages) {
        fit.thin_q = qr.householderQ() *
                     Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                               static_cast<Eigen::Index>(p));
    }
    return fit;
}

}  // namespace

PolynomialModel fit_polynomial(const RegressionDataset& data, std::size_t degree) {
    if (data.inputs.size() != data.values.size()) {
        throw std::invalid_argument("fit_polynomial: input/value length mismatch");
    }
    if (data.size() == 0) {
        throw std::invalid_argument("fit_polynomial: empty dataset");
    }
    return fit_core(data.inputs, data.values, degree, false).model;
}

double inner_cv_score(const RegressionDataset& z, std::size_t degree) {
    const std::size_t m = z.size();
    if (m < degree + 2) {
        throw std::invalid_argument("inner_cv_score: degree " + std::to_string(degree) +
                                    " needs at least " + std::to_string(degree + 2) +
                                    " points for leave-one-out, got " + std::to_string(m));
    }
    FitResult fit = fit_core(z.inputs, z.values, degree, true);

    // Held-out residual of a leave-one-out least-squares refit via the
    // leverage identity r_j / (1 - h_j); explicit refit when the leverage
    // is numerically too close to one.
    CompensatedSum squared;
    RegressionDataset rest;
    for (std::size_t j = 0; j < m; ++j) {
        const double leverage = fit.thin_q.row(static_cast<Eigen::Index>(j)).squaredNorm();
        const double denom = 1.0 - leverage;
        double err;
        if (denom > 1e-8) {
            err = fit.residuals(static_cast<Eigen::Index>(j)) / denom;
        } else {
            rest.inputs.clear();
            rest.values.clear();
            for (std::size_t t = 0; t < m; ++t) {
                if (t == j) continue;
                rest.inputs.push_back(z.inputs[t]);
                rest.values.push_back(z.values[t]);
            }
            err = fit_polynomial(rest, degree).evaluate(z.inputs[j]) - z.values[j];
        }
        squared.add(err * err);
    }
    return -squared.value() / static_cast<double>(m);
}

namespace {

// Negated mean squared prediction error over the held-out points of a model
// fit on the argument subset.
double held_out_value(const RegressionDataset& train, const RegressionDataset& test,
                      std::size_t degree) {
    const PolynomialModel model = fit_core(train.inputs, train.values, degree, false).model;
    CompensatedSum squared;
    for (std::size_t j = 0; j < test.size(); ++j) {
        const double err = model.evaluate(test.inputs[j]) - test.values[j];
        squared.add(err * err);
    }
    return -squared.value() / static_cast<double>(test.size());
}

std::vector<std::uint32_t> point_fold_assignment(std::size_t points, const EstimatorSpec& spec) {
    SampleSet shape;
    shape.variables.push_back(std::vector<double>(points, 0.0));
    return partition_folds(shape, spec.fold_count, spec.fold_seed).assignment[0];
}

void check_degrees(std::span<const std::size_t> degrees) {
    if (degrees.empty()) {
        throw std::invalid_argument("outer_estimate: empty degree set");
    }
}

}  // namespace

Estimate outer_estimate(const RegressionDataset& data, std::span<const std::size_t> degrees,
                        const EstimatorSpec& spec) {
    check_degrees(degrees);
    spec.validate();
    const std::size_t n = data.size();

    if (spec.kind == EstimatorKind::MaxEstimator) {
        std::vector<double> scores(degrees.size());
        for (std::size_t i = 0; i < degrees.size(); ++i) {
            scores[i] = inner_cv_score(data, degrees[i]);
        }
        Estimate est;
        est.maximal_sets.push_back(maximal_indices(scores));
        est.value = scores[est.maximal_sets.front().front()];
        return est;
    }
    if (!spec.is_cv()) {
        throw std::invalid_argument("outer_estimate: estimator must be ME, LBCV or LVCV");
    }

    const CvVariant variant = spec.cv_variant();
    const auto assignment = point_fold_assignment(n, spec);
    const std::size_t kfolds = spec.fold_count;

    std::vector<std::size_t> fold_sizes(kfolds, 0);
    for (auto k : assignment) ++fold_sizes[k];

    // Configuration check before any fitting: the argument subset of every
    // fold must support leave-one-out fits of every candidate degree.
    const std::size_t max_degree = *std::max_element(degrees.begin(), degrees.end());
    for (std::size_t k = 0; k < kfolds; ++k) {
        const std::size_t arg_size =
            variant == CvVariant::LowBias ? n - fold_sizes[k] : fold_sizes[k];
        if (arg_size < max_degree + 2) {
            throw std::invalid_argument(
                "outer_estimate: " + std::string(variant == CvVariant::LowBias ? "lbcv" : "lvcv") +
                " with " + std::to_string(kfolds) + " folds leaves " + std::to_string(arg_size) +
                " argument points in fold " + std::to_string(k) + ", but degree " +
                std::to_string(max_degree) + " needs " + std::to_string(max_degree + 2));
        }
    }

    Estimate est;
    est.maximal_sets.reserve(kfolds);
    CompensatedSum total;
    RegressionDataset inside, outside;
    std::vector<double> arguments(degrees.size());
    for (std::size_t k = 0; k < kfolds; ++k) {
        inside.inputs.clear();
        inside.values.clear();
        outside.inputs.clear();
        outside.values.clear();
        for (std::size_t j = 0; j < n; ++j) {
            auto& part = assignment[j] == k ? inside : outside;
            part.inputs.push_back(data.inputs[j]);
            part.values.push_back(data.values[j]);
        }
        const RegressionDataset& argument_set =
            variant == CvVariant::LowBias ? outside : inside;
        const RegressionDataset& value_set = variant == CvVariant::LowBias ? inside : outside;

        for (std::size_t i = 0; i < degrees.size(); ++i) {
            arguments[i] = inner_cv_score(argument_set, degrees[i]);
        }
        IndexSet maximal = maximal_indices(arguments);
        CompensatedSum picked;
        for (std::size_t i : maximal) {
            picked.add(held_out_value(argument_set, value_set, degrees[i]));
        }
        total.add(picked.value() / static_cast<double>(maximal.size()));
        est.maximal_sets.push_back(std::move(maximal));
    }
    est.value = total.value() / static_cast<double>(kfolds);
    return est;
}

std::size_t GroundTruthResult::best_degree() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return degrees[best];
}

double GroundTruthResult::best_value() const {
    return *std::max_element(values.begin(), values.end());
}

GroundTruthResult ground_truth_model_values(std::span<const std::size_t> degrees,
                                            std::size_t replications, std::uint64_t seed,
                                            unsigned threads) {
    check_degrees(degrees);
    if (replications < 2) {
        throw std::invalid_argument("ground_truth_model_values: need at least 2 replications");
    }
    constexpr std::size_t kBlockSize = 64;
    const std::size_t n_blocks = (replications + kBlockSize - 1) / kBlockSize;
    std::vector<std::vector<sim::MeanVarAccumulator>> block_acc(
        n_blocks, std::vector<sim::MeanVarAccumulator>(degrees.size()));

    std::atomic<std::size_t> next_block{0};
    auto worker = [&] {
        while (true) {
            const std::size_t b = next_block.fetch_add(1);
            if (b >= n_blocks) break;
            const std::size_t rep_begin = b * kBlockSize;
            const std::size_t rep_end = std::min(rep_begin + kBlockSize, replications);
            for (std::size_t r = rep_begin; r < rep_end; ++r) {
                std::mt19937_64 rng(sim::child_seed(seed, r));
                const RegressionDataset train = generate_dataset(rng);
                const RegressionDataset test = generate_dataset(rng);
                for (std::size_t i = 0; i < degrees.size(); ++i) {
                    block_acc[b][i].add(held_out_value(train, test, degrees[i]));
                }
            }
        }
    };
    unsigned n_threads = threads == 0 ? std::thread::hardware_concurrency() : threads;
    n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(n_blocks)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    GroundTruthResult result;
    result.degrees.assign(degrees.begin(), degrees.end());
    result.values.resize(degrees.size());
    result.standard_errors.resize(degrees.size());
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        sim::MeanVarAccumulator acc;
        for (std::size_t b = 0; b < n_blocks; ++b) acc.merge(block_acc[b][i]);
        result.values[i] = acc.mean;
        result.standard_errors[i] =
            std::sqrt(acc.variance() / static_cast<double>(replications));
    }
    return result;
}

RegressionConfig canonical_regression_config(std::size_t datasets, std::uint64_t master_seed) {
    RegressionConfig cfg;
    cfg.datasets = datasets;
    cfg.master_seed = master_seed;
    for (std::size_t d = 1; d <= 9; ++d) cfg.degrees.push_back(d);
    std::vector<std::size_t> capped;
    for (std::size_t d = 1; d <= 7; ++d) capped.push_back(d);

    cfg.estimators = {
        {"me", EstimatorSpec::me(), {}},
        {"lbcv-2", EstimatorSpec::lbcv(2), {}},
        {"lbcv-3", EstimatorSpec::lbcv(3), {}},
        {"lbcv-9", EstimatorSpec::lbcv(9), {}},
        {"lbcv-81", EstimatorSpec::lbcv(81), {}},
        {"lvcv-2", EstimatorSpec::lvcv(2), {}},
        {"lvcv-3", EstimatorSpec::lvcv(3), {}},
        {"lvcv-9", EstimatorSpec::lvcv(9), capped},
    };
    return cfg;
}

namespace {

std::string degree_set_string(std::span<const std::size_t> degrees) {
    bool contiguous = true;
    for (std::size_t i = 1; i < degrees.size(); ++i) {
        if (degrees[i] != degrees[i - 1] + 1) {
            contiguous = false;
            break;
        }
    }
    if (contiguous && degrees.size() > 1) {
        return std::to_string(degrees.front()) + ".." + std::to_string(degrees.back());
    }
    std::string out;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        if (i) out += '+';
        out += std::to_string(degrees[i]);
    }
    return out;
}

}  // namespace

sim::MonteCarloReport run_regression(const RegressionConfig& config, unsigned threads) {
    if (config.degrees.empty()) {
        throw std::invalid_argument("run_regression: empty default degree set");
    }
    if (config.datasets < 2) {
        throw std::invalid_argument("run_regression: need at least 2 datasets");
    }
    if (config.estimators.empty()) {
        throw std::invalid_argument("run_regression: need at least one estimator");
    }
    const std::size_t n_points = canonical_inputs().size();

    struct Prepared {
        RegressionEstimatorConfig cfg;
        std::string degree_set;
        bool interpolating = false;
    };
    std::vector<Prepared> prepared;
    for (const auto& e : config.estimators) {
        Prepared p{e, "", false};
        if (p.cfg.degrees.empty()) p.cfg.degrees = config.degrees;
        p.degree_set = degree_set_string(p.cfg.degrees);
        p.cfg.spec.validate();
        const std::size_t max_degree =
            *std::max_element(p.cfg.degrees.begin(), p.cfg.degrees.end());
        if (p.cfg.spec.is_cv()) {
            const auto assignment = point_fold_assignment(n_points, p.cfg.spec);
            std::vector<std::size_t> fold_sizes(p.cfg.spec.fold_count, 0);
            for (auto k : assignment) ++fold_sizes[k];
            for (std::size_t k = 0; k < fold_sizes.size(); ++k) {
                const std::size_t arg_size = p.cfg.spec.cv_variant() == CvVariant::LowBias
                                                 ? n_points - fold_sizes[k]
                                                 : fold_sizes[k];
                if (arg_size < max_degree + 2) {
                    throw std::invalid_argument(
                        "run_regression: estimator " + p.cfg.label + " is infeasible: fold " +
                        std::to_string(k) + " leaves " + std::to_string(arg_size) +
                        " argument points but degree " + std::to_string(max_degree) +
                        " needs " + std::to_string(max_degree + 2));
                }
                if (arg_size == max_degree + 2) p.interpolating = true;
            }
        } else if (n_points < max_degree + 2) {
            throw std::invalid_argument("run_regression: degree " + std::to_string(max_degree) +
                                        " infeasible on " + std::to_string(n_points) + " points");
        }
        prepared.push_back(std::move(p));
    }

    const GroundTruthResult truth = ground_truth_model_values(
        config.degrees, config.ground_truth_replications,
        config.master_seed ^ 0x67726F756E647472ull, threads);
    const double mu_star = truth.best_value();

    constexpr std::size_t kBlockSize = 8;
    const std::size_t n_blocks = (config.datasets + kBlockSize - 1) / kBlockSize;
    std::vector<std::vector<sim::MeanVarAccumulator>> block_acc(
        n_blocks, std::vector<sim::MeanVarAccumulator>(prepared.size()));

    std::atomic<std::size_t> next_block{0};
    std::atomic<bool> failed{false};
    std::string failure_message;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t b = next_block.fetch_add(1);
            if (b >= n_blocks || failed.load()) break;
            const std::size_t rep_begin = b * kBlockSize;
            const std::size_t rep_end = std::min(rep_begin + kBlockSize, config.datasets);
            for (std::size_t r = rep_begin; r < rep_end; ++r) {
                const std::uint64_t seed = sim::child_seed(config.master_seed, r);
                RegressionDataset data = generate_dataset(seed, config.noise_variance);
                for (std::size_t e = 0; e < prepared.size(); ++e) {
                    try {
                        block_acc[b][e].add(
                            outer_estimate(data, prepared[e].cfg.degrees, prepared[e].cfg.spec)
                                .value);
                    } catch (const std::exception& ex) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failed.exchange(true)) {
                            failure_message = "dataset " + std::to_string(r) + " (seed " +
                                              std::to_string(seed) + "), estimator " +
                                              prepared[e].cfg.label + ": " + ex.what();
                        }
                        return;
                    }
                }
            }
        }
    };
    unsigned n_threads = threads == 0 ? std::thread::hardware_concurrency() : threads;
    n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(n_blocks)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) {
        throw std::runtime_error("run_regression: " + failure_message);
    }

    std::vector<sim::MeanVarAccumulator> totals(prepared.size());
    for (std::size_t b = 0; b < n_blocks; ++b) {
        for (std::size_t e = 0; e < prepared.size(); ++e) totals[e].merge(block_acc[b][e]);
    }

    sim::MonteCarloReport report;
    report.report_kind = "regression";
    report.scenario_id = config.scenario_id;
    report.master_seed = config.master_seed;
    report.replications = config.datasets;
    report.variable_count = config.degrees.size();
    report.true_max = mu_star;
    for (std::size_t e = 0; e < prepared.size(); ++e) {
        sim::EstimatorRow row;
        row.label = prepared[e].cfg.label;
        row.kind = prepared[e].cfg.spec.kind;
        row.fold_count = prepared[e].cfg.spec.is_cv() ? prepared[e].cfg.spec.fold_count : 0;
        row.degree_set = prepared[e].degree_set;
        row.mean_estimate = totals[e].mean;
        row.bias = totals[e].mean - mu_star;
        row.variance = totals[e].variance();
        row.rmse = std::sqrt(row.bias * row.bias + row.variance);
        row.standard_error = std::sqrt(row.variance / static_cast<double>(config.datasets));
        report.estimators.push_back(std::move(row));
    }

    char buf[32];
    report.metadata.emplace_back("target", "4(sin(y)+sin(2y)) on [0,4], 81 points");
    std::snprintf(buf, sizeof buf, "%.17g", config.noise_variance);
    report.metadata.emplace_back("noise_variance", buf);
    report.metadata.emplace_back("fold_scheme", "round-robin");
    report.metadata.emplace_back("default_degrees", degree_set_string(config.degrees));
    report.metadata.emplace_back("ground_truth_replications",
                                 std::to_string(config.ground_truth_replications));
    std::string gt_values, gt_se;
    for (std::size_t i = 0; i < truth.degrees.size(); ++i) {
        if (i) {
            gt_values += ',';
            gt_se += ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", truth.values[i]);
        gt_values += buf;
        std::snprintf(buf, sizeof buf, "%.17g", truth.standard_errors[i]);
        gt_se += buf;
    }
    report.metadata.emplace_back("ground_truth_values", gt_values);
    report.metadata.emplace_back("ground_truth_se", gt_se);
    report.metadata.emplace_back("best_degree", std::to_string(truth.best_degree()));
    for (const auto& p : prepared) {
        if (p.interpolating) {
            report.metadata.emplace_back("interpolating_inner_fits", p.cfg.label);
        }
    }
    return report;
}

}  // namespace maxev::regress
