#include "maxev/bayes.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace maxev::bayes {

void BetaPosterior::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
        throw std::invalid_argument("BetaPosterior: parameters must be finite and positive");
    }
}

bool BetaPosterior::has_integer_parameters() const {
    return alpha == std::floor(alpha) && beta == std::floor(beta);
}

BetaPosterior posterior_from_counts(std::size_t ones, std::size_t total,
                                    double prior_alpha, double prior_beta) {
    if (ones > total) {
        throw std::invalid_argument("posterior_from_counts: ones (" + std::to_string(ones) +
                                    ") exceeds total (" + std::to_string(total) + ")");
    }
    BetaPosterior p{prior_alpha + static_cast<double>(ones),
                    prior_beta + static_cast<double>(total - ones)};
    p.validate();
    return p;
}

Rational PolynomialCdf::evaluate(const Rational& x) const {
    Rational acc = 0;
    for (std::size_t j = coefficients.size(); j-- > 0;) {
        acc = acc * x + coefficients[j];
    }
    return acc;
}

Rational PolynomialCdf::integral01() const {
    Rational acc = 0;
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
        acc += coefficients[j] / Rational(j + 1);
    }
    return acc;
}

bool PolynomialCdf::is_valid_cdf(std::size_t grid_points) const {
    if (coefficients.empty() || grid_points < 2) return false;
    if (evaluate(0) != 0 || evaluate(1) != 1) return false;
    Rational prev = 0;
    for (std::size_t g = 1; g < grid_points; ++g) {
        const Rational x(g, grid_points - 1);
        const Rational y = evaluate(x);
        if (y < prev) return false;
        prev = y;
    }
    return true;
}

namespace {

// Integer-coefficient polynomial of the Beta(a, b) CDF:
//   I_x(a, b) = sum_{j=a}^{n} C(n, j) x^j (1-x)^(n-j),  n = a + b - 1.
std::vector<BigInt> cdf_coefficients(long a, long b) {
    const long n = a + b - 1;
    std::vector<BigInt> coeff(static_cast<std::size_t>(n) + 1, 0);
    // Row n of Pascal's triangle.
    std::vector<BigInt> binom(static_cast<std::size_t>(n) + 1, 1);
    for (long j = 1; j <= n; ++j) {
        binom[j] = binom[j - 1] * (n - j + 1) / j;
    }
    for (long j = a; j <= n; ++j) {
        // C(n, j) x^j (1-x)^(n-j), expanded binomially.
        BigInt term = binom[j];
        const long rest = n - j;
        BigInt inner = 1;
        for (long t = 0; t <= rest; ++t) {
            coeff[j + t] += term * inner * ((t % 2 == 0) ? 1 : -1);
            inner = inner * (rest - t) / (t + 1);
        }
    }
    return coeff;
}

long checked_integer(double x, const char* what) {
    const double r = std::floor(x);
    if (r != x || r < 1.0 || r > 1e15) {
        throw std::invalid_argument(std::string(what) +
                                    ": parameter must be a positive integer, got " +
                                    std::to_string(x));
    }
    return static_cast<long>(r);
}

std::size_t product_degree(std::span<const BetaPosterior> posteriors) {
    std::size_t degree = 0;
    for (const auto& p : posteriors) {
        degree += static_cast<std::size_t>(p.alpha + p.beta) - 1;
    }
    return degree;
}

// Nodes and weights of 128-point Gauss-Legendre on [0, 1], by Newton
// iteration on the Legendre recurrence.
struct GaussLegendre128 {
    std::array<double, 128> node{};
    std::array<double, 128> weight{};

    GaussLegendre128() {
        constexpr int n = 128;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= n; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double step = p1 / dp;
                x -= step;
                if (std::abs(step) < 1e-15) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            node[i] = 0.5 * (1.0 - x);  // map [-1,1] -> [0,1], ascending half
            weight[i] = 0.5 * w;
            node[n - 1 - i] = 0.5 * (1.0 + x);
            weight[n - 1 - i] = 0.5 * w;
        }
    }
};

const GaussLegendre128& gauss_legendre_128() {
    static const GaussLegendre128 table;
    return table;
}

}  // namespace

PolynomialCdf cdf_polynomial(const BetaPosterior& posterior) {
    posterior.validate();
    const long a = checked_integer(posterior.alpha, "cdf_polynomial");
    const long b = checked_integer(posterior.beta, "cdf_polynomial");
    const auto ints = cdf_coefficients(a, b);
    PolynomialCdf out;
    out.coefficients.assign(ints.begin(), ints.end());
    return out;
}

bool exact_path_applicable(std::span<const BetaPosterior> posteriors) {
    for (const auto& p : posteriors) {
        if (!p.has_integer_parameters()) return false;
    }
    return product_degree(posteriors) <= kExactDegreeCap;
}

Rational expected_max_exact(std::span<const BetaPosterior> posteriors) {
    if (posteriors.empty()) {
        throw std::invalid_argument("expected_max_exact: need at least one posterior");
    }
    std::vector<BigInt> product{1};
    for (const auto& p : posteriors) {
        p.validate();
        const long a = checked_integer(p.alpha, "expected_max_exact");
        const long b = checked_integer(p.beta, "expected_max_exact");
        const auto factor = cdf_coefficients(a, b);
        std::vector<BigInt> next(product.size() + factor.size() - 1, 0);
        for (std::size_t u = 0; u < product.size(); ++u) {
            if (product[u] == 0) continue;
            for (std::size_t v = 0; v < factor.size(); ++v) {
                next[u + v] += product[u] * factor[v];
            }
        }
        product = std::move(next);
    }
    Rational integral = 0;
    for (std::size_t j = 0; j < product.size(); ++j) {
        if (product[j] != 0) integral += Rational(product[j], BigInt(j + 1));
    }
    return Rational(1) - integral;
}

double expected_max_quadrature(std::span<const BetaPosterior> posteriors) {
    if (posteriors.empty()) {
        throw std::invalid_argument("expected_max_quadrature: need at least one posterior");
    }
    for (const auto& p : posteriors) p.validate();
    const auto& gl = gauss_legendre_128();
    CompensatedSum integral;
    for (std::size_t q = 0; q < gl.node.size(); ++q) {
        double prod = 1.0;
        for (const auto& p : posteriors) {
            prod *= boost::math::ibeta(p.alpha, p.beta, gl.node[q]);
            if (prod == 0.0) break;
        }
        integral.add(gl.weight[q] * prod);
    }
    return 1.0 - integral.value();
}

double expected_max(std::span<const BetaPosterior> posteriors) {
    if (exact_path_applicable(posteriors)) {
        return static_cast<double>(expected_max_exact(posteriors));
    }
    return expected_max_quadrature(posteriors);
}

namespace {

std::vector<BetaPosterior> posteriors_from_samples(const SampleSet& x, double prior_alpha,
                                                   double prior_beta) {
    x.validate();
    BetaPosterior{prior_alpha, prior_beta}.validate();
    std::vector<BetaPosterior> posteriors;
    posteriors.reserve(x.variable_count());
    for (std::size_t i = 0; i < x.variable_count(); ++i) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < x.sample_count(i); ++j) {
            const double s = x.variables[i][j];
            if (s == 1.0) {
                ++ones;
            } else if (s != 0.0) {
                throw std::invalid_argument("bayes_estimator: sample " + std::to_string(j) +
                                            " of variable " + std::to_string(i) +
                                            " is not in {0, 1}");
            }
        }
        posteriors.push_back(
            posterior_from_counts(ones, x.sample_count(i), prior_alpha, prior_beta));
    }
    return posteriors;
}

}  // namespace

Estimate bayes_estimator(const SampleSet& x, double prior_alpha, double prior_beta) {
    const auto posteriors = posteriors_from_samples(x, prior_alpha, prior_beta);
    std::vector<double> means;
    means.reserve(posteriors.size());
    for (const auto& p : posteriors) means.push_back(p.mean());
    Estimate est;
    est.value = expected_max(posteriors);
    est.maximal_sets.push_back(maximal_indices(means));
    return est;
}

Rational bayes_estimator_exact(const SampleSet& x, long prior_alpha, long prior_beta) {
    if (prior_alpha < 1 || prior_beta < 1) {
        throw std::invalid_argument("bayes_estimator_exact: prior must be integer >= 1");
    }
    const auto posteriors = posteriors_from_samples(x, static_cast<double>(prior_alpha),
                                                    static_cast<double>(prior_beta));
    return expected_max_exact(posteriors);
}

}  // namespace maxev::bayes
