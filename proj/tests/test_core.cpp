#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "maxev/core.hpp"

using namespace maxev;

namespace {

double ulp_of(double x) {
    const double a = std::abs(x);
    return std::nextafter(a, std::numeric_limits<double>::infinity()) - a;
}

bool within_ulps(double a, double b, int n) {
    if (a == b) return true;
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= n * ulp_of(scale);
}

// Test-side reference mean: compensated summation in long double.
double reference_mean(const std::vector<double>& xs) {
    long double sum = 0.0L, comp = 0.0L;
    for (double xd : xs) {
        const long double x = xd;
        const long double t = sum + x;
        if (fabsl(sum) >= fabsl(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    return static_cast<double>((sum + comp) / static_cast<long double>(xs.size()));
}

SampleSet random_sample_set(std::mt19937_64& rng, bool binary) {
    std::uniform_int_distribution<std::size_t> m_dist(1, 6), n_dist(2, 12);
    std::uniform_real_distribution<double> real(-2.0, 3.0);
    SampleSet x;
    x.variables.resize(m_dist(rng));
    for (auto& v : x.variables) {
        v.resize(n_dist(rng));
        for (auto& s : v) {
            s = binary ? static_cast<double>(rng() & 1u) : real(rng);
        }
    }
    return x;
}

}  // namespace

TEST_CASE("sample_mean basics") {
    CHECK(sample_mean(std::vector<double>{1.0, 0.0}) == 0.5);
    CHECK(within_ulps(sample_mean(std::vector<double>{0.1, 0.1, 0.1}), 0.1, 4));
    CHECK(within_ulps(sample_mean(std::vector<double>{0.1, 0.2, 0.6}), 0.3, 4));
    CHECK_THROWS_AS(sample_mean(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("sample_mean compensated-summation contract") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> xs(100000);
        for (auto& x : xs) x = rep % 2 == 0 ? unit(rng) : gauss(rng) + 0.01;
        CHECK(within_ulps(sample_mean(xs), reference_mean(xs), 4));
    }
    // mixed magnitudes
    std::vector<double> mixed;
    for (int i = 0; i < 3000; ++i) {
        mixed.push_back(1e8);
        mixed.push_back(unit(rng));
        mixed.push_back(-1e8);
    }
    CHECK(within_ulps(sample_mean(mixed), reference_mean(mixed), 4));
}

TEST_CASE("maximal_indices") {
    CHECK(maximal_indices(std::vector<double>{0.1, 0.5, 0.3}) == IndexSet{1});
    CHECK(maximal_indices(std::vector<double>{0.5, 0.5}) == IndexSet{0, 1});
    CHECK(maximal_indices(std::vector<double>{-1.0}) == IndexSet{0});
    CHECK_THROWS_AS(maximal_indices(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(maximal_indices(std::vector<double>{0.0, std::nan("")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        maximal_indices(std::vector<double>{std::numeric_limits<double>::infinity()}),
        std::invalid_argument);
}

TEST_CASE("max_estimator") {
    SampleSet x{{{1.0, 0.0}, {0.0, 0.0}}};
    const Estimate est = max_estimator(x);
    CHECK(est.value == 0.5);
    CHECK(est.maximal_sets.size() == 1);
    CHECK(est.maximal_sets[0] == IndexSet{0});

    // identical sample lists give identical means, so the tie is exact
    SampleSet constant{{{3.7, 3.7, 3.7}, {3.7, 3.7, 3.7}}};
    const Estimate c = max_estimator(constant);
    CHECK(within_ulps(c.value, 3.7, 4));
    CHECK(c.maximal_sets[0] == IndexSet{0, 1});

    CHECK_THROWS_AS(max_estimator(SampleSet{}), std::invalid_argument);
    CHECK_THROWS_AS(max_estimator(SampleSet{{{1.0}, {}}}), std::invalid_argument);
}

TEST_CASE("partition_folds round-robin") {
    SampleSet x{{{1, 2, 3, 4}, {5, 6, 7, 8}}};
    const FoldPartition p = partition_folds(x, 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(p.assignment[i] == std::vector<std::uint32_t>{0, 1, 0, 1});
    }
    const auto sizes = p.fold_sizes();
    CHECK(sizes[0] == std::vector<std::size_t>{2, 2});
    CHECK(sizes[1] == std::vector<std::size_t>{2, 2});
}

TEST_CASE("partition_folds balance and leave-one-out") {
    SampleSet x{{{1, 2, 3, 4, 5}}};
    const FoldPartition p = partition_folds(x, 2);
    const auto sizes = p.fold_sizes();
    CHECK(sizes[0][0] == 3);
    CHECK(sizes[1][0] == 2);

    const FoldPartition loo = partition_folds(x, 5);
    for (const auto& row : loo.fold_sizes()) CHECK(row[0] == 1);
}

TEST_CASE("partition_folds errors name the variable") {
    SampleSet x{{{1, 2, 3, 4}, {5, 6}}};
    CHECK_THROWS_AS(partition_folds(x, 1), std::invalid_argument);
    CHECK_THROWS_WITH_AS(partition_folds(x, 3),
                         doctest::Contains("variable 1"), std::invalid_argument);
}

TEST_CASE("partition_folds seeded shuffle") {
    SampleSet x{{{1, 2, 3, 4, 5, 6, 7, 8}, {1, 2, 3, 4, 5, 6, 7, 8, 9}}};
    const FoldPartition a = partition_folds(x, 3, 99u);
    const FoldPartition b = partition_folds(x, 3, 99u);
    CHECK(a.assignment == b.assignment);

    // balanced per variable, every fold non-empty
    for (const auto& row : a.fold_sizes()) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            CHECK(row[i] >= x.sample_count(i) / 3);
            CHECK(row[i] <= (x.sample_count(i) + 2) / 3);
        }
    }

    bool differs = false;
    for (std::uint64_t seed = 0; seed < 16 && !differs; ++seed) {
        differs = partition_folds(x, 3, seed).assignment != partition_folds(x, 3).assignment;
    }
    CHECK(differs);
}

TEST_CASE("cv_fold_estimate hand enumeration") {
    SampleSet x{{{1.0, 0.0}, {0.0, 0.0}}};
    const FoldPartition p = partition_folds(x, 2);

    const auto [v0, set0] = cv_fold_estimate(x, p, 0, CvVariant::LowBias);
    CHECK(v0 == 0.5);
    CHECK(set0 == IndexSet{0, 1});

    const auto [v1, set1] = cv_fold_estimate(x, p, 1, CvVariant::LowBias);
    CHECK(v1 == 0.0);
    CHECK(set1 == IndexSet{0});

    CHECK_THROWS_AS(cv_fold_estimate(x, p, 2, CvVariant::LowBias), std::out_of_range);
}

TEST_CASE("cv_fold_estimate constants pick every variable") {
    SampleSet x{{{2.5, 2.5, 2.5, 2.5}, {2.5, 2.5, 2.5, 2.5}, {2.5, 2.5, 2.5, 2.5}}};
    const FoldPartition p = partition_folds(x, 2);
    for (std::size_t k = 0; k < 2; ++k) {
        for (CvVariant v : {CvVariant::LowBias, CvVariant::LowVariance}) {
            const auto [value, set] = cv_fold_estimate(x, p, k, v);
            CHECK(within_ulps(value, 2.5, 4));
            CHECK(set == IndexSet{0, 1, 2});
        }
    }
}

TEST_CASE("cv_estimator composition and 2-fold equivalence") {
    SampleSet x{{{1.0, 0.0}, {0.0, 0.0}}};
    const Estimate lbcv = cv_estimator(x, EstimatorSpec::lbcv(2));
    CHECK(lbcv.value == 0.25);
    CHECK(lbcv.maximal_sets.size() == 2);

    const Estimate lvcv = cv_estimator(x, EstimatorSpec::lvcv(2));
    CHECK(lvcv.value == 0.25);

    SampleSet constant{{{4.25, 4.25, 4.25, 4.25, 4.25, 4.25}}};
    for (std::size_t k : {2u, 3u, 6u}) {
        CHECK(within_ulps(cv_estimator(constant, EstimatorSpec::lbcv(k)).value, 4.25, 4));
        CHECK(within_ulps(cv_estimator(constant, EstimatorSpec::lvcv(k)).value, 4.25, 4));
    }
}

TEST_CASE("estimator spec validation") {
    CHECK_THROWS_AS(EstimatorSpec::lbcv(1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(EstimatorSpec::be(0.0, 1.0).validate(), std::invalid_argument);
    CHECK_NOTHROW(EstimatorSpec::lvcv(2).validate());
    SampleSet x{{{1.0, 0.0}}};
    CHECK_THROWS_AS(cv_estimator(x, EstimatorSpec::me()), std::invalid_argument);
}

TEST_CASE("property: fold-average identity, K=2 equivalence, lean path") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 60; ++rep) {
        const SampleSet x = random_sample_set(rng, rep % 2 == 0);
        const std::size_t max_k = x.min_sample_count();
        const std::size_t k = 2 + rng() % (max_k - 1);
        const FoldPartition p = partition_folds(x, k);
        for (CvVariant variant : {CvVariant::LowBias, CvVariant::LowVariance}) {
            const Estimate est = cv_estimator(x, p, variant);

            // the estimator equals the average of its fold values, exactly
            CompensatedSum fold_mean;
            for (std::size_t fold = 0; fold < k; ++fold) {
                fold_mean.add(cv_fold_estimate(x, p, fold, variant).first);
            }
            CHECK(est.value == fold_mean.value() / static_cast<double>(k));

            // the value-only path matches bit for bit
            CHECK(est.value == cv_value(x, p, variant));
        }
        // 2-fold LBCV and LVCV are the same estimator
        const FoldPartition two = partition_folds(x, 2);
        CHECK(cv_value(x, two, CvVariant::LowBias) == cv_value(x, two, CvVariant::LowVariance));
    }
}

TEST_CASE("property: estimates stay in the value range") {
    std::mt19937_64 rng(515);
    for (int rep = 0; rep < 40; ++rep) {
        const SampleSet x = random_sample_set(rng, false);
        const Estimate me = max_estimator(x);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& v : x.variables) {
            const double m = sample_mean(v);
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        CHECK(me.value >= lo);
        CHECK(me.value <= hi);
        CHECK(me.value == hi);

        const std::size_t k = 2 + rng() % (x.min_sample_count() - 1);
        const FoldPartition p = partition_folds(x, k);
        for (CvVariant variant : {CvVariant::LowBias, CvVariant::LowVariance}) {
            // test-side recomputation of every per-fold value-vector entry
            double vlo = std::numeric_limits<double>::infinity(), vhi = -vlo;
            for (std::size_t i = 0; i < x.variable_count(); ++i) {
                for (std::size_t fold = 0; fold < k; ++fold) {
                    std::vector<double> inside, outside;
                    for (std::size_t j = 0; j < x.sample_count(i); ++j) {
                        (p.assignment[i][j] == fold ? inside : outside)
                            .push_back(x.variables[i][j]);
                    }
                    const auto& value_side =
                        variant == CvVariant::LowBias ? inside : outside;
                    const double v = reference_mean(value_side);
                    vlo = std::min(vlo, v);
                    vhi = std::max(vhi, v);
                }
            }
            const double value = cv_value(x, p, variant);
            const double slack = 8 * ulp_of(std::max(std::abs(vlo), std::abs(vhi)));
            CHECK(value >= vlo - slack);
            CHECK(value <= vhi + slack);
        }
    }
}

TEST_CASE("property: permutation invariance") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 30; ++rep) {
        SampleSet x = random_sample_set(rng, rep % 2 == 0);
        if (x.variable_count() < 2) continue;
        SampleSet permuted = x;
        for (std::size_t i = permuted.variables.size(); i > 1; --i) {
            std::swap(permuted.variables[i - 1], permuted.variables[rng() % i]);
        }
        CHECK(max_estimator(x).value == max_estimator(permuted).value);
        const std::size_t k = 2 + rng() % (x.min_sample_count() - 1);
        for (CvVariant variant : {CvVariant::LowBias, CvVariant::LowVariance}) {
            const double a = cv_value(x, partition_folds(x, k), variant);
            const double b = cv_value(permuted, partition_folds(permuted, k), variant);
            CHECK(within_ulps(a, b, 4));
        }
    }
}

TEST_CASE("property: affine equivariance on exact transforms") {
    std::mt19937_64 rng(1234);
    for (int rep = 0; rep < 30; ++rep) {
        const SampleSet x = random_sample_set(rng, true);  // 0/1 samples
        const double a = std::ldexp(1.0, static_cast<int>(rng() % 7) - 3);  // 2^-3 .. 2^3
        const double b = static_cast<double>(static_cast<int>(rng() % 17) - 8);
        SampleSet y = x;
        for (auto& v : y.variables) {
            for (auto& s : v) s = a * s + b;
        }
        // The transform can cancel (a*v + b near zero), so the tolerance is
        // scaled by the intermediate magnitudes rather than the result.
        const double scale = a + std::abs(b);
        const Estimate me_x = max_estimator(x);
        const Estimate me_y = max_estimator(y);
        CHECK(std::abs(me_y.value - (a * me_x.value + b)) <= 8 * ulp_of(scale));
        CHECK(me_y.maximal_sets == me_x.maximal_sets);

        const std::size_t k = 2 + rng() % (x.min_sample_count() - 1);
        const FoldPartition px = partition_folds(x, k);
        const FoldPartition py = partition_folds(y, k);
        for (CvVariant variant : {CvVariant::LowBias, CvVariant::LowVariance}) {
            const Estimate ex = cv_estimator(x, px, variant);
            const Estimate ey = cv_estimator(y, py, variant);
            CHECK(std::abs(ey.value - (a * ex.value + b)) <= 8 * ulp_of(scale));
            CHECK(ey.maximal_sets == ex.maximal_sets);
        }
    }
}
