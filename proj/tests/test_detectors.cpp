#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "tsad/detectors.hpp"

using namespace tsad;

namespace {

WindowMatrix matrix(std::vector<std::vector<double>> rows) {
    std::vector<double> flat;
    const std::size_t cols = rows[0].size();
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    WindowConfig cfg{cols, 1, WindowSelector::Fixed};
    return WindowMatrix(std::move(flat), rows.size(), cols, cfg, rows.size() + cols - 1);
}

WindowMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                             double shift = 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(shift, 1.0);
    std::vector<double> flat(rows * cols);
    for (auto& v : flat) v = dist(rng);
    WindowConfig cfg{cols, 1, WindowSelector::Fixed};
    return WindowMatrix(std::move(flat), rows, cols, cfg, rows + cols - 1);
}

ScoreSeries score_matrix(const FittedDetector& det, const WindowMatrix& m) { return det.score(m); }

}  // namespace

TEST_CASE("catalog lists 24 detectors with stable names") {
    const auto catalog = list_catalog();
    CHECK(catalog.size() == 24);
    std::set<std::string> names;
    for (const auto& spec : catalog) {
        names.insert(detector_name(spec.id));
        CHECK(detector_id_from_name(detector_name(spec.id)) == spec.id);
    }
    CHECK(names.size() == 24);
    CHECK_THROWS(detector_id_from_name("nonexistent"));
}

TEST_CASE("family split matches the catalog grouping") {
    std::size_t proximity = 0, statistical = 0, forecast = 0;
    for (const auto& spec : list_catalog()) {
        switch (detector_family(spec.id)) {
            case DetectorFamily::Proximity: ++proximity; break;
            case DetectorFamily::StatisticalModel: ++statistical; break;
            case DetectorFamily::Forecast: ++forecast; break;
        }
    }
    CHECK(proximity == 14);
    CHECK(statistical == 9);
    CHECK(forecast == 1);
    CHECK(detector_family(DetectorId::Knn) == DetectorFamily::Proximity);
    CHECK(detector_family(DetectorId::Hbos) == DetectorFamily::StatisticalModel);
    CHECK(detector_family(DetectorId::LinearRegression) == DetectorFamily::Forecast);
}

TEST_CASE("knn k=1 equals the nearest-neighbor distance") {
    DetectorSpec spec{DetectorId::Knn, {{"k", 1.0}}, 0};
    const auto train = matrix({{0, 0}, {1, 1}});
    const auto det = fit(spec, train);
    const auto s = score_matrix(*det, matrix({{3, 4}}));
    CHECK(s[0] == doctest::Approx(std::sqrt(13.0)).epsilon(1e-12));  // nearest is (1,1)
}

TEST_CASE("kmeans K=1 scores by distance to the mean") {
    DetectorSpec spec{DetectorId::KMeans, {{"clusters", 1.0}}, 0};
    const auto det = fit(spec, matrix({{0, 0}, {2, 0}}));
    const auto s = score_matrix(*det, matrix({{1, 0}, {5, 0}}));
    CHECK(s[0] == doctest::Approx(0.0).epsilon(1e-9));  // centroid is (1,0)
    CHECK(s[1] == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("every detector is deterministic and separates a far outlier") {
    const auto train = gaussian_matrix(80, 6, 123);
    // One in-distribution query and one far-out query.
    const auto queries = matrix({{0.1, -0.2, 0.3, 0.0, -0.1, 0.2},
                                 {25, -25, 25, -25, 25, -25}});
    for (const auto& base : list_catalog()) {
        CAPTURE(detector_name(base.id));
        DetectorSpec spec = base;
        spec.seed = 99;
        const auto det1 = fit(spec, train);
        const auto det2 = fit(spec, train);
        const auto s1 = score_matrix(*det1, queries);
        const auto s2 = score_matrix(*det2, queries);
        REQUIRE(s1.size() == 2);
        REQUIRE(s1[0] == s2[0]);
        REQUIRE(s1[1] == s2[1]);
        REQUIRE(std::isfinite(s1[0]));
        REQUIRE(std::isfinite(s1[1]));
        REQUIRE(s1[1] > s1[0]);  // higher score = more anomalous
    }
}

TEST_CASE("scores do not depend on train row order") {
    const auto train = gaussian_matrix(40, 4, 7);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < train.rows(); ++i) {
        const auto r = train.row(i);
        rows.emplace_back(r.begin(), r.end());
    }
    std::mt19937_64 rng(13);
    auto shuffled_rows = rows;
    std::shuffle(shuffled_rows.begin(), shuffled_rows.end(), rng);
    const auto shuffled = matrix(shuffled_rows);
    const auto queries = matrix({{0.5, 0.5, -0.5, 0.0}, {8, 8, 8, 8}});

    // Order invariance holds for the distance/statistics detectors; the
    // randomized ones (Sampling, IForest, LODA, INNE, MCD) draw subsets whose
    // content changes with row order.
    for (const auto id : {DetectorId::Knn, DetectorId::Lof, DetectorId::Cof, DetectorId::Kde,
                          DetectorId::Hbos, DetectorId::Copod, DetectorId::Ecod, DetectorId::Mad,
                          DetectorId::Msd, DetectorId::Abod}) {
        CAPTURE(detector_name(id));
        DetectorSpec spec{id, {}, 1};
        const auto a = score_matrix(*fit(spec, train), queries);
        const auto b = score_matrix(*fit(spec, shuffled), queries);
        REQUIRE(a[0] == doctest::Approx(b[0]).epsilon(1e-9));
        REQUIRE(a[1] == doctest::Approx(b[1]).epsilon(1e-9));
    }
}

TEST_CASE("gmm recovers the mean of a single gaussian") {
    const std::size_t n = 400;
    const auto train = gaussian_matrix(n, 1, 55, 0.0);
    DetectorSpec spec{DetectorId::Gmm, {{"components", 1.0}}, 5};
    const auto det = fit(spec, train);
    // Scoring is a negative log-likelihood: the sample mean must score lower
    // than a point three sigma out.
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += train.row(i)[0];
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    const auto s = score_matrix(*det, matrix({{mean}, {mean + 3.0}}));
    CHECK(s[0] < s[1]);
}

TEST_CASE("fit rejects degenerate training input") {
    DetectorSpec spec{DetectorId::Knn, {}, 0};
    CHECK_THROWS(fit(spec, matrix({{1, 2}})));  // single row
}

TEST_CASE("unknown hyperparameters fall back to defaults") {
    DetectorSpec spec{DetectorId::Knn, {}, 0};
    CHECK(spec.param("k", 10.0) == 10.0);
    spec.params["k"] = 3.0;
    CHECK(spec.param("k", 10.0) == 3.0);
}
