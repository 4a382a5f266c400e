#pragma once

#include <vector>

#include "tsad/core.hpp"

namespace tsad {

/// Per-dimension min/max scaler fitted on the standard series.
/// Degenerate dimensions (max == min) map to 0.
class Normalizer {
public:
    Normalizer(std::vector<double> min, std::vector<double> max);

    const std::vector<double>& min() const { return min_; }
    const std::vector<double>& max() const { return max_; }

    TimeSeries apply(const TimeSeries& series) const;

private:
    std::vector<double> min_;
    std::vector<double> max_;
};

Normalizer fit_normalizer(const TimeSeries& series);

WindowMatrix extract_windows(const TimeSeries& series, const WindowConfig& cfg);

/// Lag of the highest local maximum of the sample ACF in [2, max_lag]
/// exceeding 0.1; falls back to 64 when no such peak exists.
std::size_t acf_window_length(const TimeSeries& series, std::size_t max_lag);

/// round(n / k*) for the dominant nonzero DFT bin k* of the mean-removed
/// first dimension, clamped to [2, max_len]; 64 on a degenerate spectrum.
std::size_t fft_window_length(const TimeSeries& series, std::size_t max_len);

/// Maps per-window scores back to per-point scores: each point gets the mean
/// score of the windows containing it. Points covered by no window (possible
/// when stride > 1) take the score of the nearest covering window.
AlignedScores dewindow(const ScoreSeries& scores, const WindowConfig& cfg, std::size_t n);

}  // namespace tsad
