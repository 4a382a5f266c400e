#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tsad {

/// Ordered, possibly multivariate sequence of real observations.
/// Stored row-major: point i, dimension j at values[i * dims + j].
class TimeSeries {
public:
    TimeSeries(std::vector<double> values, std::size_t dims, std::string name = "");

    std::size_t size() const { return n_; }
    std::size_t dims() const { return d_; }
    const std::string& name() const { return name_; }

    double at(std::size_t i, std::size_t dim) const { return values_[i * d_ + dim]; }
    std::span<const double> point(std::size_t i) const { return {values_.data() + i * d_, d_}; }
    const std::vector<double>& raw() const { return values_; }

    /// Contiguous sub-series [start, start+len).
    TimeSeries slice(std::size_t start, std::size_t len) const;

    static TimeSeries univariate(std::vector<double> values, std::string name = "");

private:
    std::vector<double> values_;
    std::size_t n_ = 0;
    std::size_t d_ = 1;
    std::string name_;
};

enum class WindowSelector { Fixed, Acf, Fft };

struct WindowConfig {
    std::size_t length = 64;
    std::size_t stride = 1;
    WindowSelector selector = WindowSelector::Fixed;
};

/// Sliding windows flattened to rows of length w*d (time-major, dimensions
/// contiguous within each time step).
class WindowMatrix {
public:
    WindowMatrix(std::vector<double> data, std::size_t rows, std::size_t cols,
                 WindowConfig config, std::size_t source_len);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const WindowConfig& config() const { return config_; }
    std::size_t source_len() const { return source_len_; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    const std::vector<double>& raw() const { return data_; }

private:
    std::vector<double> data_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    WindowConfig config_;
    std::size_t source_len_ = 0;
};

/// Per-window anomaly scores.
class ScoreSeries {
public:
    explicit ScoreSeries(std::vector<double> scores);
    std::size_t size() const { return scores_.size(); }
    double operator[](std::size_t i) const { return scores_[i]; }
    const std::vector<double>& values() const { return scores_; }

private:
    std::vector<double> scores_;
};

/// Per-point scores after de-windowing; length equals the source series.
class AlignedScores {
public:
    explicit AlignedScores(std::vector<double> scores);
    std::size_t size() const { return scores_.size(); }
    double operator[](std::size_t i) const { return scores_[i]; }
    const std::vector<double>& values() const { return scores_; }

private:
    std::vector<double> scores_;
};

/// Binary per-point labels, 1 = anomaly.
class LabelSeries {
public:
    explicit LabelSeries(std::vector<int> labels);
    std::size_t size() const { return labels_.size(); }
    int operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<int>& values() const { return labels_; }

private:
    std::vector<int> labels_;
};

/// Inclusive index range [start, end].
struct AnomalyRange {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - start + 1; }
    bool operator==(const AnomalyRange&) const = default;
};

/// Validates that ranges are in-bounds, sorted and disjoint.
void validate_ranges(const std::vector<AnomalyRange>& ranges, std::size_t n);

LabelSeries ranges_to_labels(const std::vector<AnomalyRange>& ranges, std::size_t n);
std::vector<AnomalyRange> labels_to_ranges(const LabelSeries& labels);

}  // namespace tsad
