#include <random>
#include <vector>

#include "doctest.h"
#include "tsad/metrics.hpp"

using namespace tsad;

namespace {

/// Mann-Whitney by brute-force pair counting with ties scored 0.5.
double auc_oracle(const std::vector<double>& scores, const std::vector<int>& truth) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (truth[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (truth[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("point prf hand case") {
    const auto prf = point_prf(LabelSeries({1, 0, 1}), LabelSeries({1, 1, 0}));
    CHECK(prf.precision == doctest::Approx(0.5));
    CHECK(prf.recall == doctest::Approx(0.5));
    CHECK(prf.f1 == doctest::Approx(0.5));

    const auto none = point_prf(LabelSeries({0, 0}), LabelSeries({0, 0}));
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.f1 == 0.0);
}

TEST_CASE("range f1 hand case") {
    // truth [0,9], pred [0,4]: recall = 0.5*1 + 0.5*0.5, precision = 1.
    LabelSeries truth({1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    LabelSeries pred({1, 1, 1, 1, 1, 0, 0, 0, 0, 0});
    CHECK(range_f1(pred, truth) == doctest::Approx(2.0 * 0.75 / 1.75).epsilon(1e-12));
}

TEST_CASE("range f1 perfect and disjoint cases") {
    LabelSeries truth({0, 1, 1, 0, 0, 1});
    CHECK(range_f1(truth, truth) == doctest::Approx(1.0));
    CHECK(range_f1(LabelSeries({1, 0, 0, 1, 1, 0}), truth) == doctest::Approx(0.0));
}

TEST_CASE("auc roc hand case") {
    CHECK(auc_roc(AlignedScores({0.4, 0.3, 0.2, 0.6}), LabelSeries({0, 1, 0, 1})) ==
          doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("auc roc equals pair counting on random instances") {
    std::mt19937_64 rng(19);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 10 + rng() % 191;
        std::vector<double> scores(n);
        std::vector<int> truth(n);
        std::uniform_int_distribution<int> level(0, 8);  // coarse levels force ties
        bool has_pos = false, has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = static_cast<double>(level(rng)) / 8.0;
            truth[i] = static_cast<int>(rng() % 2);
            (truth[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) {
            truth[0] = 1;
            truth[1] = 0;
        }
        REQUIRE(auc_roc(AlignedScores(scores), LabelSeries(truth)) ==
                doctest::Approx(auc_oracle(scores, truth)).epsilon(1e-9));
    }
}

TEST_CASE("auc pr hand cases") {
    CHECK(auc_pr(AlignedScores({0.9, 0.1}), LabelSeries({0, 1})) == doctest::Approx(0.5));
    CHECK(auc_pr(AlignedScores({0.1, 0.9}), LabelSeries({0, 1})) == doctest::Approx(1.0));
}

TEST_CASE("auc pr approaches prevalence on random scores") {
    std::mt19937_64 rng(77);
    const std::size_t n = 5000;
    std::vector<double> scores(n);
    std::vector<int> truth(n);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = dist(rng);
        truth[i] = dist(rng) < 0.3 ? 1 : 0;
        pos += static_cast<std::size_t>(truth[i]);
    }
    const double prevalence = static_cast<double>(pos) / static_cast<double>(n);
    CHECK(auc_pr(AlignedScores(scores), LabelSeries(truth)) ==
          doctest::Approx(prevalence).epsilon(0.05));
}

TEST_CASE("single-class truth leaves the AUCs absent") {
    const auto rec = evaluate_all(AlignedScores({0.1, 0.2}), LabelSeries({0, 0}),
                                  LabelSeries({0, 0}), {});
    CHECK(!rec.auc_roc.has_value());
    CHECK(!rec.auc_pr.has_value());
    CHECK(!rec.vus_roc.has_value());
    CHECK(!rec.vus_pr.has_value());
}

TEST_CASE("vus reduces to the point AUC at L=0") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> scores(120);
    std::vector<int> truth(120, 0);
    for (auto& s : scores) s = dist(rng);
    for (std::size_t i = 40; i < 55; ++i) truth[i] = 1;
    const AlignedScores as(scores);
    const LabelSeries ts(truth);
    CHECK(vus(as, ts, 0, VusKind::Roc) == doctest::Approx(auc_roc(as, ts)).epsilon(1e-9));
    CHECK(vus(as, ts, 0, VusKind::Pr) == doctest::Approx(auc_pr(as, ts)).epsilon(1e-9));
}

TEST_CASE("vus on perfect scores is 1 for any buffer") {
    std::vector<double> scores(60, 0.0);
    std::vector<int> truth(60, 0);
    for (std::size_t i = 20; i < 30; ++i) {
        scores[i] = 1.0;
        truth[i] = 1;
    }
    CHECK(vus(AlignedScores(scores), LabelSeries(truth), 0, VusKind::Roc) == doctest::Approx(1.0));
    // With relaxation the ramp points score 0 but carry partial positive
    // weight, so the value stays high though not exactly 1.
    CHECK(vus(AlignedScores(scores), LabelSeries(truth), 8, VusKind::Roc) > 0.85);
}

TEST_CASE("relaxed labels ramp linearly around ranges") {
    const auto relaxed = detail::relax_labels(LabelSeries({0, 0, 0, 1, 1, 0, 0, 0}), 2);
    CHECK(relaxed[3] == 1.0);
    CHECK(relaxed[4] == 1.0);
    CHECK(relaxed[2] == doctest::Approx(2.0 / 3.0));
    CHECK(relaxed[1] == doctest::Approx(1.0 / 3.0));
    CHECK(relaxed[0] == 0.0);
    CHECK(relaxed[5] == doctest::Approx(2.0 / 3.0));
    CHECK(relaxed[7] == 0.0);
}

TEST_CASE("evaluate_all fills all eight names") {
    std::vector<double> scores = {0.1, 0.9, 0.2, 0.8};
    LabelSeries pred({0, 1, 0, 1});
    LabelSeries truth({0, 1, 0, 0});
    const auto rec = evaluate_all(AlignedScores(scores), pred, truth, {});
    CHECK(MetricRecord::names().size() == 8);
    for (const auto& name : MetricRecord::names()) {
        CAPTURE(name);
        REQUIRE(rec.by_name(name).has_value());
    }
    CHECK_THROWS(rec.by_name("bogus"));
}

TEST_CASE("weighted auc with binary weights matches the point measures") {
    std::mt19937_64 rng(91);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> scores(100);
    std::vector<double> weights(100);
    std::vector<int> truth(100);
    for (std::size_t i = 0; i < 100; ++i) {
        scores[i] = dist(rng);
        truth[i] = i % 3 == 0 ? 1 : 0;
        weights[i] = truth[i];
    }
    CHECK(detail::weighted_auc_roc(scores, weights) ==
          doctest::Approx(auc_roc(AlignedScores(scores), LabelSeries(truth))).epsilon(1e-9));
    CHECK(detail::weighted_auc_pr(scores, weights) ==
          doctest::Approx(auc_pr(AlignedScores(scores), LabelSeries(truth))).epsilon(1e-9));
}
