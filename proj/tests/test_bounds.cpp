#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "maxev/bounds.hpp"

using namespace maxev;
using bounds::VarianceProfile;

TEST_CASE("me_bias_upper_bound") {
    CHECK(bounds::me_bias_upper_bound(VarianceProfile{{1.0}}) == 0.0);
    CHECK(bounds::me_bias_upper_bound(VarianceProfile{{1.0, 1.0}}) == doctest::Approx(1.0));
    // ads setting 1, M = 10: Var(mu_hat_i) = 0.25 / 10000
    VarianceProfile ads{std::vector<double>(10, 0.25 / 10000.0)};
    CHECK(bounds::me_bias_upper_bound(ads) == doctest::Approx(0.015).epsilon(1e-12));
}

TEST_CASE("me_variance_bound") {
    CHECK(bounds::me_variance_bound(VarianceProfile{{1.0, 1.0}}) == 2.0);
    CHECK(bounds::me_variance_bound(VarianceProfile{{0.31}}) == 0.31);
    VarianceProfile ads{std::vector<double>(10, 0.25 / 10000.0)};
    CHECK(bounds::me_variance_bound(ads) == doctest::Approx(2.5e-4).epsilon(1e-12));
}

TEST_CASE("cv_variance_bound") {
    // sigma2 = 1, N = 100, K = 10, equal folds: Var(mu_hat^k_i) = 0.1
    std::vector<std::vector<double>> per_fold(10, std::vector<double>(3, 0.1));
    CHECK(bounds::cv_variance_bound(per_fold) == doctest::Approx(0.03).epsilon(1e-12));

    CHECK_THROWS_AS(bounds::cv_variance_bound({{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(bounds::cv_variance_bound_equal_folds(VarianceProfile{{1.0}}, 1),
                    std::invalid_argument);

    // ads setting 1, M = 10, K = 10: equal folds collapse to the ME variance bound
    VarianceProfile ads{std::vector<double>(10, 0.25 / 10000.0)};
    std::vector<std::vector<double>> ads_folds(10, std::vector<double>(10, 0.25 / 1000.0));
    CHECK(bounds::cv_variance_bound(ads_folds) == doctest::Approx(2.5e-4).epsilon(1e-12));
    CHECK(bounds::cv_variance_bound_equal_folds(ads, 10) == bounds::me_variance_bound(ads));
}

TEST_CASE("cv_bias_lower_bound") {
    std::vector<std::vector<double>> zero(4, std::vector<double>(5, 0.0));
    CHECK(bounds::cv_bias_lower_bound(zero) == 0.0);

    std::vector<std::vector<double>> m2{{1.0, 1.0}};
    CHECK(bounds::cv_bias_lower_bound(m2, true) ==
          doctest::Approx(-0.5 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(bounds::cv_bias_lower_bound(m2, false) ==
          doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));

    std::vector<std::vector<double>> m3{{1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(bounds::cv_bias_lower_bound(m3, true), std::invalid_argument);

    // ads setting 1, M = 10, K = 10, LBCV: Var(a_hat^k_i) = 0.25 / 9000
    std::vector<std::vector<double>> ads(10, std::vector<double>(10, 0.25 / 9000.0));
    CHECK(bounds::cv_bias_lower_bound(ads) ==
          doctest::Approx(-std::sqrt(10.0 * 0.25 / 9000.0)).epsilon(1e-12));
    CHECK(bounds::cv_bias_lower_bound(ads) == doctest::Approx(-0.0167).epsilon(0.01));
}

TEST_CASE("profile construction") {
    const auto p = VarianceProfile::from_sample_variances(std::vector<double>{1.0, 2.0},
                                                          std::vector<std::size_t>{10, 20});
    CHECK(p.per_variable_variance[0] == doctest::Approx(0.1));
    CHECK(p.per_variable_variance[1] == doctest::Approx(0.1));
    CHECK_THROWS_AS(VarianceProfile::from_estimator_variances({-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(VarianceProfile{}.validate(), std::invalid_argument);
}

TEST_CASE("fold variance matrices from partitions") {
    SampleSet shape{{std::vector<double>(10, 0.0), std::vector<double>(5, 0.0)}};
    const FoldPartition folds = partition_folds(shape, 5);
    const std::vector<double> sigma2{2.0, 3.0};

    const auto value_side = bounds::fold_mean_variances(sigma2, folds);
    REQUIRE(value_side.size() == 5);
    CHECK(value_side[0][0] == doctest::Approx(2.0 / 2.0));
    CHECK(value_side[0][1] == doctest::Approx(3.0 / 1.0));

    const auto lbcv = bounds::argument_variances(sigma2, folds, CvVariant::LowBias);
    CHECK(lbcv[0][0] == doctest::Approx(2.0 / 8.0));
    CHECK(lbcv[0][1] == doctest::Approx(3.0 / 4.0));
    const auto lvcv = bounds::argument_variances(sigma2, folds, CvVariant::LowVariance);
    CHECK(lvcv[0][0] == doctest::Approx(2.0 / 2.0));
}

TEST_CASE("property: bound consistency and monotonicity") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> var(0.0, 4.0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t m = 1 + rng() % 8;
        std::vector<double> vs(m);
        for (auto& v : vs) v = var(rng);
        VarianceProfile p{vs};

        // (M-1)/M < 1 makes the bias bound at most sqrt of the variance bound
        CHECK(bounds::me_bias_upper_bound(p) <=
              std::sqrt(bounds::me_variance_bound(p)) + 1e-15);

        // bounds never decrease when a variance grows
        std::vector<double> grown = vs;
        grown[rng() % m] += 0.5;
        VarianceProfile q{grown};
        CHECK(bounds::me_bias_upper_bound(q) >= bounds::me_bias_upper_bound(p));
        CHECK(bounds::me_variance_bound(q) >= bounds::me_variance_bound(p));

        std::vector<std::vector<double>> folds(3, vs), folds_grown(3, grown);
        CHECK(bounds::cv_variance_bound(folds_grown) >= bounds::cv_variance_bound(folds));
        CHECK(bounds::cv_bias_lower_bound(folds_grown) <= bounds::cv_bias_lower_bound(folds));
    }
}
