#include "tsad/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tsad {

namespace {
constexpr std::size_t kFallbackWindow = 64;
}

Normalizer::Normalizer(std::vector<double> min, std::vector<double> max)
    : min_(std::move(min)), max_(std::move(max)) {
    if (min_.size() != max_.size() || min_.empty())
        throw std::invalid_argument("Normalizer: min/max size mismatch");
    for (std::size_t j = 0; j < min_.size(); ++j) {
        if (min_[j] > max_[j]) throw std::invalid_argument("Normalizer: min > max");
    }
}

TimeSeries Normalizer::apply(const TimeSeries& series) const {
    if (series.dims() != min_.size())
        throw std::invalid_argument("Normalizer::apply: dimension mismatch");
    const std::size_t n = series.size(), d = series.dims();
    std::vector<double> out(n * d);
    for (std::size_t j = 0; j < d; ++j) {
        const double range = max_[j] - min_[j];
        for (std::size_t i = 0; i < n; ++i) {
            out[i * d + j] = range > 0.0 ? (series.at(i, j) - min_[j]) / range : 0.0;
        }
    }
    return TimeSeries(std::move(out), d, series.name());
}

Normalizer fit_normalizer(const TimeSeries& series) {
    const std::size_t d = series.dims();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = std::min(lo[j], series.at(i, j));
            hi[j] = std::max(hi[j], series.at(i, j));
        }
    }
    return Normalizer(std::move(lo), std::move(hi));
}

WindowMatrix extract_windows(const TimeSeries& series, const WindowConfig& cfg) {
    const std::size_t n = series.size(), d = series.dims(), w = cfg.length, s = cfg.stride;
    if (w == 0 || s == 0) throw std::invalid_argument("extract_windows: length/stride must be >= 1");
    if (w > n) throw std::invalid_argument("extract_windows: window longer than series");
    const std::size_t n_w = (n - w) / s + 1;
    std::vector<double> data;
    data.reserve(n_w * w * d);
    for (std::size_t k = 0; k < n_w; ++k) {
        const double* begin = series.raw().data() + k * s * d;
        data.insert(data.end(), begin, begin + w * d);
    }
    return WindowMatrix(std::move(data), n_w, w * d, cfg, n);
}

std::size_t acf_window_length(const TimeSeries& series, std::size_t max_lag) {
    const std::size_t n = series.size();
    if (n < 4) throw std::invalid_argument("acf_window_length: series too short");
    max_lag = std::min(max_lag, n - 1);

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = series.at(i, 0);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    if (var <= 0.0) return kFallbackWindow;

    std::vector<double> acf(max_lag + 1, 0.0);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - mean) * (x[i + lag] - mean);
        acf[lag] = s / var;
    }

    // Highest local maximum with value > 0.1 at lag >= 2.
    std::size_t best = 0;
    double best_val = 0.1;
    for (std::size_t lag = 2; lag + 1 <= max_lag; ++lag) {
        if (acf[lag] > best_val && acf[lag] >= acf[lag - 1] && acf[lag] >= acf[lag + 1]) {
            best = lag;
            best_val = acf[lag];
        }
    }
    return best >= 2 ? best : kFallbackWindow;
}

std::size_t fft_window_length(const TimeSeries& series, std::size_t max_len) {
    const std::size_t n = series.size();
    if (n < 4) throw std::invalid_argument("fft_window_length: series too short");

    std::vector<double> x(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += (x[i] = series.at(i, 0));
    mean /= static_cast<double>(n);
    for (double& v : x) v -= mean;

    // Direct DFT magnitudes for bins 1..n/2; n is desk-scale here.
    std::size_t k_star = 0;
    double best = 0.0;
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double a = two_pi * static_cast<double>(k) * static_cast<double>(t) /
                             static_cast<double>(n);
            re += x[t] * std::cos(a);
            im -= x[t] * std::sin(a);
        }
        const double mag = re * re + im * im;
        if (mag > best) {
            best = mag;
            k_star = k;
        }
    }
    if (k_star == 0 || best < 1e-18) return kFallbackWindow;
    const double period = static_cast<double>(n) / static_cast<double>(k_star);
    auto len = static_cast<std::size_t>(std::llround(period));
    return std::clamp<std::size_t>(len, 2, max_len);
}

AlignedScores dewindow(const ScoreSeries& scores, const WindowConfig& cfg, std::size_t n) {
    const std::size_t w = cfg.length, s = cfg.stride;
    const std::size_t n_w = (n - w) / s + 1;
    if (scores.size() != n_w) throw std::invalid_argument("dewindow: score count inconsistent");

    std::vector<double> sum(n, 0.0);
    std::vector<std::size_t> count(n, 0);
    for (std::size_t k = 0; k < n_w; ++k) {
        for (std::size_t i = k * s; i < k * s + w; ++i) {
            sum[i] += scores[k];
            ++count[i];
        }
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (count[i] > 0) {
            out[i] = sum[i] / static_cast<double>(count[i]);
        } else {
            // Uncovered point (stride > 1): nearest covering window by center.
            std::size_t best_k = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < n_w; ++k) {
                const double center = static_cast<double>(k * s) + (static_cast<double>(w) - 1.0) / 2.0;
                const double dist = std::abs(center - static_cast<double>(i));
                if (dist < best_dist) {
                    best_dist = dist;
                    best_k = k;
                }
            }
            out[i] = scores[best_k];
        }
    }
    return AlignedScores(std::move(out));
}

}  // namespace tsad
