#include "maxev/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "maxev/bounds.hpp"
#include "maxev/oracle.hpp"
#include "maxev/regression.hpp"
#include "maxev/report.hpp"
#include "maxev/simulation.hpp"

namespace maxev::cli {

namespace {

// Maps to exit code 1 (as opposed to library precondition errors, which
// map to 2).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep)) out.push_back(item);
    return out;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::size_t parse_size(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw config_error(what + ": expected a non-negative integer, got '" + text + "'");
    }
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    return parse_size(text, what);
}

double parse_real(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error(what + ": expected a real number, got '" + text + "'");
    }
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_real(trim(item), what));
    if (out.empty()) throw config_error(what + ": empty list");
    return out;
}

// Degree sets: "1..9" or "1,2,5".
std::vector<std::size_t> parse_degrees(const std::string& text) {
    std::vector<std::size_t> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const std::size_t lo = parse_size(trim(text.substr(0, dots)), "degrees");
        const std::size_t hi = parse_size(trim(text.substr(dots + 2)), "degrees");
        if (hi < lo) throw config_error("degrees: range '" + text + "' is reversed");
        for (std::size_t d = lo; d <= hi; ++d) out.push_back(d);
    } else {
        for (const auto& item : split(text, ',')) {
            out.push_back(parse_size(trim(item), "degrees"));
        }
    }
    if (out.empty()) throw config_error("degrees: empty set");
    return out;
}

// Exact rational from "p/q" or a decimal string such as "0.25".
Rational parse_rational(const std::string& text, const std::string& what) {
    const std::string s = trim(text);
    if (s.empty()) throw config_error(what + ": empty value");
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            const BigInt num(s.substr(0, slash));
            const BigInt den(s.substr(slash + 1));
            if (den == 0) throw std::invalid_argument("zero denominator");
            return Rational(num, den);
        }
        const auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(BigInt(s));
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        const std::size_t frac_digits = s.size() - dot - 1;
        if (frac_digits == 0 || digits.empty()) throw std::invalid_argument("malformed");
        BigInt den = 1;
        for (std::size_t i = 0; i < frac_digits; ++i) den *= 10;
        return Rational(BigInt(digits), den);
    } catch (const std::exception&) {
        throw config_error(what + ": cannot parse '" + text + "' as a rational");
    }
}

std::string rational_string(const Rational& r) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(r) << "/" << boost::multiprecision::denominator(r);
    return os.str();
}

unsigned resolve_threads(unsigned flag_value) {
    if (flag_value != 0) return flag_value;
    if (const char* env = std::getenv("MAXEV_THREADS")) {
        try {
            return static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw config_error("MAXEV_THREADS: expected an integer, got '" + std::string(env) +
                               "'");
        }
    }
    return 0;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw io_error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << is.rdbuf();
    if (is.bad()) throw io_error("failed reading '" + path + "'");
    return os.str();
}

// ---- run ----------------------------------------------------------------

struct RunOptions {
    std::string config_path;
    std::string scenario;
    std::string m;
    std::string replications;
    std::string seed;
    std::string k_list;
    std::string variant;       // me | lbcv | lvcv | all
    std::string degrees;
    std::string gt_replications;
    std::string out;
    std::string format;        // csv | json | both
    unsigned threads = 0;
};

void apply_config_file(RunOptions& opt) {
    if (opt.config_path.empty()) return;
    std::ifstream is(opt.config_path);
    if (!is) throw io_error("cannot open config '" + opt.config_path + "'");
    std::map<std::string, std::string*> keys{
        {"scenario", &opt.scenario},   {"m", &opt.m},
        {"r", &opt.replications},      {"replications", &opt.replications},
        {"seed", &opt.seed},           {"k", &opt.k_list},
        {"variant", &opt.variant},     {"degrees", &opt.degrees},
        {"gt_replications", &opt.gt_replications},
        {"out", &opt.out},             {"output", &opt.out},
        {"format", &opt.format},
    };
    std::string line;
    std::size_t line_no = 0;
    std::string threads_value;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error(opt.config_path + ":" + std::to_string(line_no) +
                               ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "threads") {
            threads_value = value;
            continue;
        }
        const auto it = keys.find(key);
        if (it == keys.end()) {
            throw config_error(opt.config_path + ":" + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
        }
        // Flags override file values: only fill fields still empty.
        if (it->second->empty()) *it->second = value;
    }
    if (opt.threads == 0 && !threads_value.empty()) {
        opt.threads = static_cast<unsigned>(parse_size(threads_value, "threads"));
    }
}

std::vector<sim::EstimatorConfig> build_ads_estimators(const std::vector<std::string>& ks,
                                                       const std::string& variant,
                                                       std::size_t per_variable) {
    auto resolve_k = [&](const std::string& k) -> std::size_t {
        if (k == "loo") return per_variable;
        return parse_size(k, "k");
    };
    auto label_k = [&](const std::string& k) { return k == "loo" ? "loo" : k; };
    std::vector<sim::EstimatorConfig> out;
    if (variant == "me" || variant == "all") {
        out.push_back({"me", EstimatorSpec::me()});
    }
    if (variant == "lvcv" || variant == "all") {
        for (const auto& k : ks) {
            const std::size_t kk = resolve_k(k);
            if (variant == "all" && kk == 2) continue;  // folded into cv-2 below
            out.push_back({"lvcv-" + label_k(k), EstimatorSpec::lvcv(kk)});
        }
    }
    if (variant == "all") {
        for (const auto& k : ks) {
            if (resolve_k(k) == 2) {
                out.push_back({"cv-2", EstimatorSpec::lbcv(2)});
                break;
            }
        }
    }
    if (variant == "lbcv" || variant == "all") {
        for (const auto& k : ks) {
            const std::size_t kk = resolve_k(k);
            if (variant == "all" && kk == 2) continue;
            out.push_back({"lbcv-" + label_k(k), EstimatorSpec::lbcv(kk)});
        }
    }
    if (out.empty()) throw config_error("run: no estimators selected");
    return out;
}

int cmd_run(const RunOptions& options) {
    RunOptions opt = options;
    apply_config_file(opt);
    if (opt.scenario.empty()) {
        throw config_error("run: a scenario is required (ads1 | ads2 | regression)");
    }
    if (opt.variant.empty()) opt.variant = "all";
    if (opt.variant != "all" && opt.variant != "me" && opt.variant != "lbcv" &&
        opt.variant != "lvcv") {
        throw config_error("run: unknown variant '" + opt.variant + "'");
    }
    if (opt.format.empty()) opt.format = "both";
    if (opt.format != "csv" && opt.format != "json" && opt.format != "both") {
        throw config_error("run: unknown format '" + opt.format + "'");
    }
    const unsigned threads = resolve_threads(opt.threads);
    const std::uint64_t seed =
        opt.seed.empty() ? sim::kDefaultMasterSeed : parse_u64(opt.seed, "seed");

    sim::MonteCarloReport report;
    std::vector<std::pair<std::string, std::string>> resolved{
        {"config.scenario", opt.scenario},
        {"config.seed", std::to_string(seed)},
        {"config.variant", opt.variant},
    };

    if (opt.scenario == "ads1" || opt.scenario == "ads2") {
        const int setting = opt.scenario == "ads1" ? 1 : 2;
        const std::size_t m = opt.m.empty() ? (setting == 1 ? 10 : 30)
                                            : parse_size(opt.m, "m");
        const std::size_t r =
            opt.replications.empty() ? 2000 : parse_size(opt.replications, "r");
        sim::ScenarioConfig cfg = sim::ads_scenario(setting, m, r, seed);
        if (!opt.k_list.empty() || opt.variant != "all") {
            std::vector<std::string> ks = opt.k_list.empty()
                                              ? std::vector<std::string>{"loo", "10", "5", "2"}
                                              : split(opt.k_list, ',');
            for (auto& k : ks) k = trim(k);
            cfg.estimators =
                build_ads_estimators(ks, opt.variant, cfg.samples_per_variable.front());
        }
        resolved.emplace_back("config.m", std::to_string(m));
        resolved.emplace_back("config.r", std::to_string(r));
        if (!opt.k_list.empty()) resolved.emplace_back("config.k", opt.k_list);
        report = sim::run_monte_carlo(cfg, threads);
    } else if (opt.scenario == "regression") {
        const std::size_t datasets =
            opt.replications.empty() ? 1000 : parse_size(opt.replications, "r");
        regress::RegressionConfig cfg = regress::canonical_regression_config(datasets, seed);
        if (!opt.degrees.empty()) {
            cfg.degrees = parse_degrees(opt.degrees);
            for (auto& e : cfg.estimators) e.degrees.clear();
            resolved.emplace_back("config.degrees", opt.degrees);
        }
        if (!opt.gt_replications.empty()) {
            cfg.ground_truth_replications = parse_size(opt.gt_replications, "gt_replications");
        }
        if (!opt.k_list.empty() || opt.variant != "all") {
            std::vector<std::string> ks = opt.k_list.empty()
                                              ? std::vector<std::string>{"2", "3", "9", "81"}
                                              : split(opt.k_list, ',');
            std::vector<regress::RegressionEstimatorConfig> estimators;
            if (opt.variant == "me" || opt.variant == "all") {
                estimators.push_back({"me", EstimatorSpec::me(), {}});
            }
            for (const std::string& variant : {std::string("lbcv"), std::string("lvcv")}) {
                if (opt.variant != variant && opt.variant != "all") continue;
                for (const auto& k_raw : ks) {
                    const std::string k = trim(k_raw);
                    const std::size_t kk = parse_size(k, "k");
                    estimators.push_back({variant + "-" + k,
                                          variant == "lbcv" ? EstimatorSpec::lbcv(kk)
                                                            : EstimatorSpec::lvcv(kk),
                                          {}});
                }
            }
            cfg.estimators = std::move(estimators);
            if (!opt.k_list.empty()) resolved.emplace_back("config.k", opt.k_list);
        }
        resolved.emplace_back("config.r", std::to_string(datasets));
        report = regress::run_regression(cfg, threads);
    } else {
        throw config_error("run: unknown scenario '" + opt.scenario + "'");
    }

    report.metadata.insert(report.metadata.begin(), resolved.begin(), resolved.end());
    std::cout << report::human_table(report);
    if (!opt.out.empty()) {
        if (opt.format == "csv" || opt.format == "both") {
            write_file(opt.out + ".csv", report::to_csv(report));
        }
        if (opt.format == "json" || opt.format == "both") {
            write_file(opt.out + ".json", report::to_json_text(report));
        }
    }
    return 0;
}

// ---- oracle -------------------------------------------------------------

struct OracleOptions {
    std::string means;
    std::size_t n = 0;
    std::string estimator = "me";
    std::size_t k = 2;
    std::string prior = "1,1";
    int weights_fold = -1;
    bool table = false;
};

int cmd_oracle(const OracleOptions& opt) {
    oracle::DiscreteInstance inst;
    for (const auto& item : split(opt.means, ',')) {
        inst.means.push_back(parse_rational(item, "means"));
    }
    inst.samples_per_variable = opt.n;

    EstimatorSpec spec;
    if (opt.estimator == "me") {
        spec = EstimatorSpec::me();
    } else if (opt.estimator == "lbcv") {
        spec = EstimatorSpec::lbcv(opt.k);
    } else if (opt.estimator == "lvcv") {
        spec = EstimatorSpec::lvcv(opt.k);
    } else if (opt.estimator == "be") {
        const auto prior = parse_real_list(opt.prior, "prior");
        if (prior.size() != 2) throw config_error("prior: expected 'alpha,beta'");
        spec = EstimatorSpec::be(prior[0], prior[1]);
    } else {
        throw config_error("oracle: unknown estimator '" + opt.estimator + "'");
    }

    const Rational expectation = oracle::enumerate_expected_value(inst, spec);
    const Rational bias = expectation - oracle::true_max(inst);
    std::cout << "estimator:   " << opt.estimator
              << (spec.is_cv() ? " (K = " + std::to_string(opt.k) + ")" : "") << "\n"
              << "outcomes:    " << inst.outcome_count() << "\n"
              << "expectation: " << rational_string(expectation) << " = "
              << report::format_double(static_cast<double>(expectation)) << "\n"
              << "exact bias:  " << rational_string(bias) << " = "
              << report::format_double(static_cast<double>(bias)) << "\n";

    if (opt.weights_fold >= 0) {
        const auto weights =
            oracle::selection_weights(inst, spec, static_cast<std::size_t>(opt.weights_fold));
        std::cout << "selection weights (fold " << opt.weights_fold << "):\n";
        for (std::size_t i = 0; i < weights.size(); ++i) {
            std::cout << "  w[" << i << "] = " << rational_string(weights[i]) << " = "
                      << report::format_double(static_cast<double>(weights[i])) << "\n";
        }
    }
    if (opt.table) {
        std::cout << "outcome table (per-variable sample bits, oldest sample first):\n";
        for (const auto& row : oracle::outcome_table(inst, spec)) {
            std::cout << "  ";
            for (std::size_t i = 0; i < row.masks.size(); ++i) {
                if (i) std::cout << ' ';
                for (std::size_t j = 0; j < inst.samples_per_variable; ++j) {
                    std::cout << ((row.masks[i] >> j) & 1u);
                }
            }
            std::cout << "  p = " << rational_string(row.probability)
                      << "  value = " << rational_string(row.value) << "\n";
        }
    }
    return 0;
}

// ---- bounds -------------------------------------------------------------

struct BoundsOptions {
    std::size_t m = 0;
    std::string var;
    std::string sigma2;
    std::string counts;
    std::size_t k = 0;
    std::string variant = "lbcv";
    bool m2_tight = false;
};

int cmd_bounds(const BoundsOptions& opt) {
    if (opt.variant != "lbcv" && opt.variant != "lvcv") {
        throw config_error("bounds: unknown variant '" + opt.variant + "'");
    }
    std::vector<double> estimator_var;
    std::vector<double> sigma2;
    std::vector<std::size_t> counts;

    if (!opt.var.empty()) {
        estimator_var = parse_real_list(opt.var, "var");
    } else if (!opt.sigma2.empty() && !opt.counts.empty()) {
        sigma2 = parse_real_list(opt.sigma2, "sigma2");
        for (const auto& c : split(opt.counts, ',')) {
            counts.push_back(parse_size(trim(c), "n"));
        }
    } else {
        throw config_error("bounds: provide --var, or --sigma2 with --n");
    }

    auto broadcast = [&](std::vector<double>& v) {
        if (opt.m != 0 && v.size() == 1) v.assign(opt.m, v.front());
    };
    broadcast(estimator_var);
    broadcast(sigma2);
    if (opt.m != 0 && counts.size() == 1) counts.assign(opt.m, counts.front());

    for (double v : estimator_var) {
        if (v < 0) throw config_error("bounds: negative variance");
    }
    for (double v : sigma2) {
        if (v < 0) throw config_error("bounds: negative variance");
    }

    bounds::VarianceProfile profile;
    std::vector<std::vector<double>> fold_var, arg_var;
    if (!estimator_var.empty()) {
        profile = bounds::VarianceProfile::from_estimator_variances(estimator_var);
        if (opt.k >= 2) {
            // Equal-fold sample-average forms.
            const double kk = static_cast<double>(opt.k);
            fold_var.assign(opt.k, std::vector<double>());
            arg_var.assign(opt.k, std::vector<double>());
            for (double v : estimator_var) {
                for (std::size_t k = 0; k < opt.k; ++k) {
                    fold_var[k].push_back(v * kk);
                    arg_var[k].push_back(opt.variant == "lbcv" ? v * kk / (kk - 1.0) : v * kk);
                }
            }
        }
    } else {
        if (sigma2.size() != counts.size()) {
            throw config_error("bounds: --sigma2 and --n must have equal length");
        }
        profile = bounds::VarianceProfile::from_sample_variances(sigma2, counts);
        if (opt.k >= 2) {
            SampleSet shape;
            for (std::size_t n : counts) {
                shape.variables.push_back(std::vector<double>(n, 0.0));
            }
            const FoldPartition folds = partition_folds(shape, opt.k);
            fold_var = bounds::fold_mean_variances(sigma2, folds);
            arg_var = bounds::argument_variances(
                sigma2, folds,
                opt.variant == "lbcv" ? CvVariant::LowBias : CvVariant::LowVariance);
        }
    }

    std::cout << "ME bias upper bound:     "
              << report::format_double(bounds::me_bias_upper_bound(profile)) << "\n";
    std::cout << "ME variance bound:       "
              << report::format_double(bounds::me_variance_bound(profile)) << "\n";
    if (opt.k >= 2) {
        std::cout << "CV variance bound (K=" << opt.k << "): "
                  << report::format_double(bounds::cv_variance_bound(fold_var)) << "\n";
        std::cout << "CV bias lower bound:     "
                  << report::format_double(bounds::cv_bias_lower_bound(arg_var, false)) << "\n";
        if (opt.m2_tight || profile.per_variable_variance.size() == 2) {
            std::cout << "CV bias lower bound (M=2 tightened): "
                      << report::format_double(bounds::cv_bias_lower_bound(arg_var, true))
                      << "\n";
        }
    }
    return 0;
}

// ---- plotdata / list ----------------------------------------------------

int cmd_plotdata(const std::string& report_path, const std::string& out_path) {
    sim::MonteCarloReport report;
    try {
        report = report::parse_json_text(read_file(report_path));
    } catch (const io_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error("plotdata: malformed report '" + report_path + "': " + e.what());
    }
    const std::string csv = report::plot_data_csv(report);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        write_file(out_path, csv);
    }
    return 0;
}

int cmd_list() {
    std::cout << "scenarios:\n"
              << "  ads1        M identical Bernoulli(0.5) ads, 100,000 visitors\n"
              << "  ads2        M Bernoulli ads, means evenly in [0.02, 0.05], 300,000 visitors\n"
              << "  regression  polynomial model selection on 81 noisy points\n"
              << "estimators:\n"
              << "  me          maximum of the per-variable estimates\n"
              << "  lbcv-K      low-bias K-fold CV (argmax on K-1 folds, valued on one)\n"
              << "  lvcv-K      low-variance K-fold CV (argmax on one fold, valued on K-1)\n"
              << "  cv-2        2-fold CV (LBCV and LVCV coincide)\n"
              << "  be          Beta-Bernoulli Bayesian estimator (oracle command)\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"estimators for the maximum expected value of a set of random variables"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run_cmd = app.add_subcommand("run", "run a scenario and write its report");
    run_cmd->add_option("--config", run_opt.config_path, "key = value configuration file");
    run_cmd->add_option("--scenario", run_opt.scenario, "ads1 | ads2 | regression");
    run_cmd->add_option("--m", run_opt.m, "number of variables (ads scenarios)");
    run_cmd->add_option("--r", run_opt.replications, "replications / datasets");
    run_cmd->add_option("--seed", run_opt.seed, "64-bit master seed");
    run_cmd->add_option("--k", run_opt.k_list, "fold counts, comma list ('loo' allowed)");
    run_cmd->add_option("--variant", run_opt.variant, "me | lbcv | lvcv | all (default all)");
    run_cmd->add_option("--degrees", run_opt.degrees, "candidate degrees (regression), e.g. 1..9");
    run_cmd->add_option("--gt-replications", run_opt.gt_replications,
                        "ground-truth replications (regression)");
    run_cmd->add_option("--out", run_opt.out, "output path prefix");
    run_cmd->add_option("--format", run_opt.format, "csv | json | both (default both)");
    run_cmd->add_option("--threads", run_opt.threads, "worker threads (0 = hardware)");

    OracleOptions oracle_opt;
    auto* oracle_cmd = app.add_subcommand("oracle", "exact expectation by outcome enumeration");
    oracle_cmd->add_option("--means", oracle_opt.means, "Bernoulli means, e.g. 0.5,0.5 or 1/2,1/4")
        ->required();
    oracle_cmd->add_option("--n", oracle_opt.n, "samples per variable")->required();
    oracle_cmd->add_option("--estimator", oracle_opt.estimator, "me | lbcv | lvcv | be");
    oracle_cmd->add_option("--k", oracle_opt.k, "fold count (CV estimators)");
    oracle_cmd->add_option("--prior", oracle_opt.prior, "Beta prior 'alpha,beta' (be)");
    oracle_cmd->add_option("--weights-fold", oracle_opt.weights_fold,
                           "print selection weights for this fold");
    oracle_cmd->add_flag("--table", oracle_opt.table, "print the full outcome table");

    BoundsOptions bounds_opt;
    auto* bounds_cmd = app.add_subcommand("bounds", "closed-form bias/variance bounds");
    bounds_cmd->add_option("--m", bounds_opt.m, "number of variables (broadcasts single values)");
    bounds_cmd->add_option("--var", bounds_opt.var, "estimator variances Var(mu_hat_i)");
    bounds_cmd->add_option("--sigma2", bounds_opt.sigma2, "per-sample variances sigma^2_i");
    bounds_cmd->add_option("--n", bounds_opt.counts, "per-variable sample counts");
    bounds_cmd->add_option("--k", bounds_opt.k, "fold count for the CV bounds");
    bounds_cmd->add_option("--variant", bounds_opt.variant, "argument side: lbcv | lvcv");
    bounds_cmd->add_flag("--m2-tight", bounds_opt.m2_tight, "print the M=2 tightened bound");

    std::string plot_report, plot_out;
    auto* plot_cmd = app.add_subcommand("plotdata", "stacked bias/variance shares from a report");
    plot_cmd->add_option("--report", plot_report, "report JSON file")->required();
    plot_cmd->add_option("--out", plot_out, "output CSV (default: stdout)");

    auto* list_cmd = app.add_subcommand("list", "list built-in scenarios and estimators");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_opt);
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_opt);
        if (bounds_cmd->parsed()) return cmd_bounds(bounds_opt);
        if (plot_cmd->parsed()) return cmd_plotdata(plot_report, plot_out);
        if (list_cmd->parsed()) return cmd_list();
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace maxev::cli
