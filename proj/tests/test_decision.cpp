#include <cmath>
#include <random>

#include "doctest.h"
#include "tsad/decision.hpp"

using namespace tsad;

namespace {

/// erf via its Maclaurin series, independent of std::erf.
double erf_series(double x) {
    const double two_over_sqrt_pi = 1.1283791670955126;
    double term = x, sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -x * x / static_cast<double>(n);
        sum += term / (2.0 * static_cast<double>(n) + 1.0);
        if (std::abs(term) < 1e-18) break;
    }
    return two_over_sqrt_pi * sum;
}

}  // namespace

TEST_CASE("learn_decision uses mean and population std") {
    const auto m1 = learn_decision(AlignedScores({1, 3}));
    CHECK(m1.mu == doctest::Approx(2.0));
    CHECK(m1.sigma == doctest::Approx(1.0));

    const auto m2 = learn_decision(AlignedScores({2, 2, 2, 6}));
    CHECK(m2.mu == doctest::Approx(3.0));
    CHECK(m2.sigma == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("sigma is floored on constant validation scores") {
    const auto m = learn_decision(AlignedScores({5, 5, 5}));
    CHECK(m.sigma == 1e-12);
}

TEST_CASE("threshold override replaces the default") {
    const auto m = learn_decision(AlignedScores({1, 3}), 0.5);
    CHECK(m.threshold == 0.5);
    const auto d = learn_decision(AlignedScores({1, 3}));
    CHECK(d.threshold == default_threshold());
}

TEST_CASE("default threshold equals the two-sigma normal CDF") {
    CHECK(default_threshold() == doctest::Approx(0.9772498681).epsilon(1e-9));
    // Phi(2) = (1 + erf(2/sqrt 2)) / 2 via the series oracle.
    const double phi2 = (1.0 + erf_series(2.0 / std::sqrt(2.0))) / 2.0;
    CHECK(default_threshold() == doctest::Approx(phi2).epsilon(1e-12));
}

TEST_CASE("decide hand values") {
    DecisionModel m{0.0, 1.0, default_threshold()};
    CHECK(decide(m, 3.0) == doctest::Approx((erf_series(std::sqrt(2.0)) - 0.5) * 2.0).epsilon(1e-12));
    CHECK(decide(m, 3.0) == doctest::Approx(0.909000).epsilon(1e-5));
    CHECK(decide(m, 1.0) == 0.0);                      // a = mu + sigma
    CHECK(decide(m, 0.0) == 0.0);                      // below mu + sigma clamps to 0
    CHECK(decide(m, 10.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("decide is monotone in the score") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mu_dist(-5.0, 5.0);
    std::uniform_real_distribution<double> sigma_dist(1e-6, 3.0);
    std::uniform_real_distribution<double> a_dist(-10.0, 10.0);
    for (int rep = 0; rep < 10000; ++rep) {
        DecisionModel m{mu_dist(rng), sigma_dist(rng), default_threshold()};
        double a = a_dist(rng), b = a_dist(rng);
        if (a > b) std::swap(a, b);
        REQUIRE(decide(m, a) <= decide(m, b));
        REQUIRE(decide(m, a) >= 0.0);
        REQUIRE(decide(m, b) <= 1.0);
    }
}

TEST_CASE("health series labels at the threshold") {
    DecisionModel m{0.0, 1.0, default_threshold()};
    const auto [health, labels] = health_series(m, AlignedScores({0.0, 1.0, 11.0}));
    CHECK(health.size() == 3);
    CHECK(health[2] == doctest::Approx(1.0).epsilon(1e-9));  // mu + 11 sigma
    CHECK(labels.values() == std::vector<int>{0, 0, 1});
}
