#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "tsad/difficulty.hpp"

using namespace tsad;

namespace {

Sequence wave(std::size_t m, double period, bool square, double offset, double noise,
              std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Sequence s(m);
    for (std::size_t t = 0; t < m; ++t) {
        const double v = std::sin(2.0 * std::numbers::pi * (static_cast<double>(t) + offset) / period);
        s[t] = (square ? (v >= 0 ? 1.0 : -1.0) : v) + noise * dist(rng);
    }
    return s;
}

/// Brute-force KNC: mean of each query's k smallest SBDs to the standard set,
/// averaged per population, anomalous over normal.
double knc_oracle(const SequenceSets& sets) {
    auto mean_knn = [&](const std::vector<Sequence>& queries) {
        double total = 0.0;
        for (const auto& q : queries) {
            std::vector<double> d;
            for (const auto& s : sets.std_set) d.push_back(sbd(q, s));
            std::sort(d.begin(), d.end());
            double mean = 0.0;
            for (std::size_t i = 0; i < sets.k; ++i) mean += d[i];
            total += mean / static_cast<double>(sets.k);
        }
        return total / static_cast<double>(queries.size());
    };
    return mean_knn(sets.ano_set) / mean_knn(sets.nor_set);
}

double nc_oracle(const std::vector<Sequence>& nor, const std::vector<Sequence>& ano) {
    auto intra = [](const std::vector<Sequence>& set) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < set.size(); ++i) {
            for (std::size_t j = i + 1; j < set.size(); ++j) {
                sum += sbd(set[i], set[j]);
                ++count;
            }
        }
        return sum / static_cast<double>(count);
    };
    return intra(nor) / intra(ano);
}

SequenceSets make_sets(std::uint64_t seed, double noise, bool far_anomalies) {
    std::mt19937_64 rng(seed);
    SequenceSets sets;
    for (int i = 0; i < 12; ++i) sets.std_set.push_back(wave(64, 16.0, false, 0.0, noise, rng));
    for (int i = 0; i < 8; ++i) sets.nor_set.push_back(wave(64, 16.0, false, 0.0, noise, rng));
    for (int i = 0; i < 6; ++i)
        sets.ano_set.push_back(far_anomalies ? wave(64, 16.0, true, 0.0, noise, rng)
                                             : wave(64, 16.0, false, 0.0, noise, rng));
    sets.k = 5;
    return sets;
}

}  // namespace

TEST_CASE("knc exceeds 5 on far square anomalies") {
    const auto sets = make_sets(3, 0.05, true);
    CHECK(knc(sets) > 5.0);
}

TEST_CASE("knc is near 1 when anomalies match the baseline") {
    const auto sets = make_sets(3, 0.05, false);
    CHECK(knc(sets) == doctest::Approx(1.0).epsilon(0.5));
}

TEST_CASE("knc matches the brute-force oracle") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto sets = make_sets(seed, 0.2, true);
        REQUIRE(knc(sets) == doctest::Approx(knc_oracle(sets)).epsilon(1e-12));
    }
}

TEST_CASE("knc input validation") {
    auto sets = make_sets(1, 0.1, true);
    sets.k = sets.std_set.size() + 1;
    CHECK_THROWS(knc(sets));
    sets.k = 5;
    sets.ano_set.clear();
    CHECK_THROWS(knc(sets));
}

TEST_CASE("rc exceeds 1 on two tight distant clusters") {
    std::mt19937_64 rng(4);
    std::vector<Sequence> seqs;
    for (int i = 0; i < 4; ++i) seqs.push_back(wave(32, 8.0, false, 0.0, 0.01, rng));
    for (int i = 0; i < 4; ++i) seqs.push_back(wave(32, 8.0, true, 0.0, 0.01, rng));
    CHECK(rc(seqs) > 1.0);
}

TEST_CASE("nc matches the brute-force double loop") {
    const auto sets = make_sets(9, 0.2, true);
    CHECK(nc(sets.nor_set, sets.ano_set) ==
          doctest::Approx(nc_oracle(sets.nor_set, sets.ano_set)).epsilon(1e-12));
}

TEST_CASE("na separates far geometry") {
    const auto far = make_sets(6, 0.05, true);
    const double v = na(far.nor_set, far.ano_set, 2, 2, 1);
    CHECK(v > 0.0);
    // Same seed reruns are identical.
    CHECK(v == na(far.nor_set, far.ano_set, 2, 2, 1));
}

TEST_CASE("knc bands use the half-open convention") {
    CHECK(knc_band(0.0) == KncBand::Below1);
    CHECK(knc_band(0.999) == KncBand::Below1);
    CHECK(knc_band(1.0) == KncBand::From1To2);
    CHECK(knc_band(2.0) == KncBand::From2To5);
    CHECK(knc_band(5.0) == KncBand::From5To10);
    CHECK(knc_band(10.0) == KncBand::Above10);
    CHECK(knc_band(98.0) == KncBand::Above10);
    CHECK(knc_band_name(KncBand::Above10) != knc_band_name(KncBand::Below1));
}
