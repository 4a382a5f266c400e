#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "tsad/preprocess.hpp"

using namespace tsad;

namespace {

TimeSeries sine_series(std::size_t n, double period, double amplitude = 1.0,
                       double noise = 0.0, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / period) +
               noise * dist(rng);
    return TimeSeries::univariate(std::move(v));
}

/// Explicit window-membership average: point i gets the mean score over all
/// windows [start, start+w) that contain i.
std::vector<double> dewindow_oracle(const std::vector<double>& scores, std::size_t w,
                                    std::size_t stride, std::size_t n) {
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < scores.size(); ++k) {
            const std::size_t start = k * stride;
            if (i >= start && i < start + w) {
                sum += scores[k];
                ++count;
            }
        }
        if (count > 0) {
            out[i] = sum / static_cast<double>(count);
        } else {
            // Nearest covering window by distance to the window span.
            double best = 1e300;
            for (std::size_t k = 0; k < scores.size(); ++k) {
                const std::size_t start = k * stride;
                const double d = i < start ? static_cast<double>(start - i)
                                           : static_cast<double>(i - (start + w - 1));
                if (d < best) {
                    best = d;
                    out[i] = scores[k];
                }
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("normalizer maps train range to [0,1]") {
    const auto ts = TimeSeries::univariate({0, 2, 4});
    const auto norm = fit_normalizer(ts);
    const auto scaled = norm.apply(TimeSeries::univariate({8}));
    CHECK(scaled.at(0, 0) == doctest::Approx(2.0));  // (8-0)/4, out-of-range passes through

    const auto flat = fit_normalizer(TimeSeries::univariate({3, 3, 3}));
    CHECK(flat.apply(TimeSeries::univariate({3})).at(0, 0) == 0.0);
}

TEST_CASE("normalizer is per-dimension") {
    const TimeSeries ts({0, 10, 1, 20}, 2);
    const auto norm = fit_normalizer(ts);
    const auto scaled = norm.apply(ts);
    CHECK(scaled.at(0, 0) == 0.0);
    CHECK(scaled.at(1, 0) == 1.0);
    CHECK(scaled.at(0, 1) == 0.0);
    CHECK(scaled.at(1, 1) == 1.0);
}

TEST_CASE("window extraction count and contents") {
    const auto ts = TimeSeries::univariate({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    const auto wm = extract_windows(ts, {4, 2, WindowSelector::Fixed});
    CHECK(wm.rows() == 4);  // floor(6/2)+1
    CHECK(wm.cols() == 4);
    CHECK(wm.row(0)[0] == 0);
    CHECK(wm.row(3)[0] == 6);
    CHECK(wm.row(3)[3] == 9);

    CHECK_THROWS(extract_windows(ts, {11, 1, WindowSelector::Fixed}));
}

TEST_CASE("windows interleave dimensions time-major") {
    const TimeSeries ts({1, 10, 2, 20, 3, 30}, 2);
    const auto wm = extract_windows(ts, {2, 1, WindowSelector::Fixed});
    CHECK(wm.rows() == 2);
    CHECK(wm.cols() == 4);
    const auto r0 = wm.row(0);
    CHECK(r0[0] == 1);
    CHECK(r0[1] == 10);
    CHECK(r0[2] == 2);
    CHECK(r0[3] == 20);
}

TEST_CASE("acf window length finds the period of a sine") {
    CHECK(acf_window_length(sine_series(400, 20.0), 128) == 20);
}

TEST_CASE("acf window length falls back to 64 on white noise") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(400);
    for (auto& x : v) x = dist(rng);
    CHECK(acf_window_length(TimeSeries::univariate(std::move(v)), 128) == 64);
}

TEST_CASE("fft window length finds the dominant period") {
    CHECK(fft_window_length(sine_series(500, 25.0), 256) == 25);
}

TEST_CASE("fft window length picks the larger-amplitude component") {
    std::vector<double> v(500);
    for (std::size_t i = 0; i < 500; ++i) {
        const double t = static_cast<double>(i);
        v[i] = 3.0 * std::sin(2.0 * std::numbers::pi * t / 10.0) +
               1.0 * std::sin(2.0 * std::numbers::pi * t / 50.0);
    }
    CHECK(fft_window_length(TimeSeries::univariate(std::move(v)), 256) == 10);
}

TEST_CASE("dewindow hand case") {
    const ScoreSeries s({1, 3, 5});
    const auto out = dewindow(s, {2, 1, WindowSelector::Fixed}, 4);
    CHECK(out.values() == std::vector<double>{1, 2, 4, 5});
}

TEST_CASE("dewindow equals the membership-average oracle") {
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rng() % 499;
        const std::size_t w = 1 + rng() % n;
        const std::size_t stride = 1 + rng() % w;  // keep full coverage
        const std::size_t rows = (n - w) / stride + 1;
        std::vector<double> scores(rows);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (auto& s : scores) s = dist(rng);
        const auto got = dewindow(ScoreSeries(scores), {w, stride, WindowSelector::Fixed}, n);
        const auto want = dewindow_oracle(scores, w, stride, n);
        REQUIRE(got.size() == n);
        for (std::size_t i = 0; i < n; ++i)
            REQUIRE(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("dewindow fills uncovered points from the nearest window") {
    // n=7, w=2, stride=3: windows cover {0,1}, {3,4}; points 2,5,6 uncovered.
    const ScoreSeries s({10, 20});
    const auto out = dewindow(s, {2, 3, WindowSelector::Fixed}, 7);
    CHECK(out.values() == std::vector<double>{10, 10, 10, 20, 20, 20, 20});
}
