#include "maxev/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "maxev/bayes.hpp"

namespace maxev::sim {

DistributionSpec DistributionSpec::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("DistributionSpec: Bernoulli p must be in [0, 1]");
    }
    return {Kind::Bernoulli, p, 0.0};
}

DistributionSpec DistributionSpec::gaussian(double mean, double variance) {
    if (!(variance >= 0.0) || !std::isfinite(variance) || !std::isfinite(mean)) {
        throw std::invalid_argument("DistributionSpec: Gaussian needs finite mean, variance >= 0");
    }
    return {Kind::Gaussian, mean, variance};
}

DistributionSpec DistributionSpec::point_mass(double value) {
    return {Kind::PointMass, value, 0.0};
}

double DistributionSpec::mean() const {
    return param_a;
}

double DistributionSpec::variance() const {
    switch (kind) {
        case Kind::Bernoulli: return param_a * (1.0 - param_a);
        case Kind::Gaussian: return param_b;
        case Kind::PointMass: return 0.0;
    }
    return 0.0;
}

std::string DistributionSpec::to_string() const {
    char buf[64];
    switch (kind) {
        case Kind::Bernoulli:
            std::snprintf(buf, sizeof buf, "bernoulli(%.17g)", param_a);
            break;
        case Kind::Gaussian:
            std::snprintf(buf, sizeof buf, "gaussian(%.17g,%.17g)", param_a, param_b);
            break;
        case Kind::PointMass:
            std::snprintf(buf, sizeof buf, "pointmass(%.17g)", param_a);
            break;
    }
    return buf;
}

double true_max_mean(std::span<const DistributionSpec> distributions) {
    if (distributions.empty()) {
        throw std::invalid_argument("true_max_mean: need at least one distribution");
    }
    double best = distributions.front().mean();
    for (const auto& d : distributions) best = std::max(best, d.mean());
    return best;
}

namespace {

std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64_finalize(master + (index + 1) * 0x9E3779B97F4A7C15ull);
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_gaussian(std::mt19937_64& rng) {
    const double u1 = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double draw(const DistributionSpec& dist, std::mt19937_64& rng) {
    switch (dist.kind) {
        case DistributionSpec::Kind::Bernoulli:
            return uniform01(rng) < dist.param_a ? 1.0 : 0.0;
        case DistributionSpec::Kind::Gaussian:
            return dist.param_a + std::sqrt(dist.param_b) * standard_gaussian(rng);
        case DistributionSpec::Kind::PointMass:
            return dist.param_a;
    }
    return 0.0;
}

void ScenarioConfig::validate() const {
    if (distributions.empty()) {
        throw std::invalid_argument("ScenarioConfig: need at least one variable");
    }
    if (samples_per_variable.size() != distributions.size()) {
        throw std::invalid_argument("ScenarioConfig: distribution/sample-count length mismatch");
    }
    for (std::size_t i = 0; i < samples_per_variable.size(); ++i) {
        if (samples_per_variable[i] == 0) {
            throw std::invalid_argument("ScenarioConfig: variable " + std::to_string(i) +
                                        " has no samples");
        }
    }
    if (replications < 2) {
        throw std::invalid_argument("ScenarioConfig: need at least 2 replications");
    }
    if (estimators.empty()) {
        throw std::invalid_argument("ScenarioConfig: need at least one estimator");
    }
    for (const auto& e : estimators) e.spec.validate();
}

void MeanVarAccumulator::add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
}

void MeanVarAccumulator::merge(const MeanVarAccumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
        *this = other;
        return;
    }
    const double total = static_cast<double>(count + other.count);
    const double delta = other.mean - mean;
    m2 += other.m2 +
          delta * delta * (static_cast<double>(count) * static_cast<double>(other.count) / total);
    mean += delta * (static_cast<double>(other.count) / total);
    count += other.count;
}

namespace {

struct PreparedEstimator {
    EstimatorConfig config;
    FoldPartition partition;  // CV kinds only
};

struct Workspace {
    SampleSet samples;
    CvScratch scratch;
};

double evaluate_estimator(const PreparedEstimator& prepared, Workspace& ws) {
    const auto& spec = prepared.config.spec;
    switch (spec.kind) {
        case EstimatorKind::MaxEstimator: {
            double best = sample_mean(ws.samples.variables[0]);
            for (std::size_t i = 1; i < ws.samples.variable_count(); ++i) {
                best = std::max(best, sample_mean(ws.samples.variables[i]));
            }
            return best;
        }
        case EstimatorKind::LowBiasCv:
            return cv_value(ws.samples, prepared.partition, CvVariant::LowBias, ws.scratch);
        case EstimatorKind::LowVarianceCv:
            return cv_value(ws.samples, prepared.partition, CvVariant::LowVariance, ws.scratch);
        case EstimatorKind::Bayes:
            return bayes::bayes_estimator(ws.samples, spec.prior_alpha, spec.prior_beta).value;
    }
    throw std::logic_error("evaluate_estimator: unknown estimator kind");
}

}  // namespace

MonteCarloReport run_monte_carlo(const ScenarioConfig& config, unsigned threads) {
    config.validate();

    // A shape-only sample set so fold partitions can be built (and their
    // preconditions checked) before any sampling happens.
    SampleSet shape;
    shape.variables.resize(config.distributions.size());
    for (std::size_t i = 0; i < config.samples_per_variable.size(); ++i) {
        shape.variables[i].assign(config.samples_per_variable[i], 0.0);
    }

    std::vector<PreparedEstimator> prepared;
    prepared.reserve(config.estimators.size());
    for (const auto& e : config.estimators) {
        PreparedEstimator p{e, {}};
        if (e.spec.is_cv()) {
            p.partition = partition_folds(shape, e.spec.fold_count, e.spec.fold_seed);
        }
        prepared.push_back(std::move(p));
    }

    const std::size_t n_estimators = prepared.size();
    const std::size_t replications = config.replications;
    constexpr std::size_t kBlockSize = 64;
    const std::size_t n_blocks = (replications + kBlockSize - 1) / kBlockSize;

    std::vector<std::vector<MeanVarAccumulator>> block_acc(
        n_blocks, std::vector<MeanVarAccumulator>(n_estimators));

    std::atomic<std::size_t> next_block{0};
    std::atomic<bool> failed{false};
    std::string failure_message;
    std::mutex failure_mutex;

    auto worker = [&] {
        Workspace ws;
        ws.samples.variables.resize(config.distributions.size());
        for (std::size_t i = 0; i < config.samples_per_variable.size(); ++i) {
            ws.samples.variables[i].resize(config.samples_per_variable[i]);
        }
        while (true) {
            const std::size_t b = next_block.fetch_add(1);
            if (b >= n_blocks || failed.load()) break;
            const std::size_t rep_begin = b * kBlockSize;
            const std::size_t rep_end = std::min(rep_begin + kBlockSize, replications);
            for (std::size_t r = rep_begin; r < rep_end; ++r) {
                const std::uint64_t seed = child_seed(config.master_seed, r);
                std::mt19937_64 rng(seed);
                for (std::size_t i = 0; i < config.distributions.size(); ++i) {
                    auto& samples = ws.samples.variables[i];
                    for (auto& s : samples) s = draw(config.distributions[i], rng);
                }
                for (std::size_t e = 0; e < n_estimators; ++e) {
                    try {
                        block_acc[b][e].add(evaluate_estimator(prepared[e], ws));
                    } catch (const std::exception& ex) {
                        std::lock_guard<std::mutex> lock(failure_mutex);
                        if (!failed.exchange(true)) {
                            failure_message = "replication " + std::to_string(r) + " (seed " +
                                              std::to_string(seed) + "), estimator " +
                                              prepared[e].config.label + ": " + ex.what();
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
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) {
        throw std::runtime_error("run_monte_carlo: " + failure_message);
    }

    // Fixed-order reduction: block index order, independent of threading.
    std::vector<MeanVarAccumulator> totals(n_estimators);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        for (std::size_t e = 0; e < n_estimators; ++e) totals[e].merge(block_acc[b][e]);
    }

    MonteCarloReport report;
    report.report_kind = "simulation";
    report.scenario_id = config.scenario_id;
    report.master_seed = config.master_seed;
    report.replications = replications;
    report.variable_count = config.distributions.size();
    report.true_max = true_max_mean(config.distributions);
    report.metadata = config.metadata;
    for (std::size_t e = 0; e < n_estimators; ++e) {
        EstimatorRow row;
        row.label = prepared[e].config.label;
        row.kind = prepared[e].config.spec.kind;
        row.fold_count = prepared[e].config.spec.is_cv() ? prepared[e].config.spec.fold_count : 0;
        row.mean_estimate = totals[e].mean;
        row.bias = totals[e].mean - report.true_max;
        row.variance = totals[e].variance();
        row.rmse = std::sqrt(row.bias * row.bias + row.variance);
        row.standard_error = std::sqrt(row.variance / static_cast<double>(replications));
        report.estimators.push_back(std::move(row));
    }
    return report;
}

ScenarioConfig ads_scenario(int setting, std::size_t variables, std::size_t replications,
                            std::uint64_t master_seed) {
    if (setting != 1 && setting != 2) {
        throw std::invalid_argument("ads_scenario: setting must be 1 or 2");
    }
    if (variables < 2) {
        throw std::invalid_argument("ads_scenario: need at least 2 ads");
    }
    ScenarioConfig cfg;
    cfg.scenario_id = (setting == 1 ? "ads1-m" : "ads2-m") + std::to_string(variables);
    cfg.replications = replications;
    cfg.master_seed = master_seed;

    const std::size_t total = setting == 1 ? 100000 : 300000;
    const std::size_t per_variable = total / variables;
    const bool canonical =
        setting == 1 ? (variables == 10 || variables == 100 || variables == 1000)
                     : (variables == 30 || variables == 300 || variables == 3000);
    if (!canonical) {
        cfg.metadata.emplace_back("warning", "non-canonical ad count " +
                                                 std::to_string(variables));
    }
    if (total % variables != 0) {
        cfg.metadata.emplace_back(
            "warning", "total visitor count not divisible by M; using floor(N/M) = " +
                           std::to_string(per_variable));
    }
    if (per_variable < 10) {
        throw std::invalid_argument("ads_scenario: fewer than 10 samples per ad");
    }

    cfg.distributions.reserve(variables);
    for (std::size_t i = 0; i < variables; ++i) {
        double p = 0.5;
        if (setting == 2) {
            // Inclusive equidistant grid over [0.02, 0.05].
            p = 0.02 + 0.03 * static_cast<double>(i) / static_cast<double>(variables - 1);
        }
        cfg.distributions.push_back(DistributionSpec::bernoulli(p));
    }
    cfg.samples_per_variable.assign(variables, per_variable);

    const std::size_t loo = per_variable;
    cfg.estimators = {
        {"me", EstimatorSpec::me()},
        {"lvcv-loo", EstimatorSpec::lvcv(loo)},
        {"lvcv-10", EstimatorSpec::lvcv(10)},
        {"lvcv-5", EstimatorSpec::lvcv(5)},
        {"cv-2", EstimatorSpec::lbcv(2)},
        {"lbcv-5", EstimatorSpec::lbcv(5)},
        {"lbcv-10", EstimatorSpec::lbcv(10)},
        {"lbcv-loo", EstimatorSpec::lbcv(loo)},
    };

    cfg.metadata.emplace_back("setting", std::to_string(setting));
    cfg.metadata.emplace_back("total_samples", std::to_string(total));
    cfg.metadata.emplace_back("samples_per_variable", std::to_string(per_variable));
    cfg.metadata.emplace_back("fold_scheme", "round-robin");
    if (setting == 2) {
        cfg.metadata.emplace_back("means_grid", "inclusive-equidistant[0.02,0.05]");
    }
    return cfg;
}

}  // namespace maxev::sim
