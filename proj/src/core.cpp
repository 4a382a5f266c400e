#include "tsad/core.hpp"

#include <cmath>
#include <stdexcept>

namespace tsad {

namespace {

void require_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
    }
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values, std::size_t dims, std::string name)
    : values_(std::move(values)), d_(dims), name_(std::move(name)) {
    if (d_ == 0) throw std::invalid_argument("TimeSeries: dims must be >= 1");
    if (values_.empty() || values_.size() % d_ != 0)
        throw std::invalid_argument("TimeSeries: value count not a positive multiple of dims");
    require_finite(values_, "TimeSeries");
    n_ = values_.size() / d_;
}

TimeSeries TimeSeries::slice(std::size_t start, std::size_t len) const {
    if (len == 0 || start + len > n_) throw std::out_of_range("TimeSeries::slice: bad range");
    std::vector<double> out(values_.begin() + static_cast<std::ptrdiff_t>(start * d_),
                            values_.begin() + static_cast<std::ptrdiff_t>((start + len) * d_));
    return TimeSeries(std::move(out), d_, name_);
}

TimeSeries TimeSeries::univariate(std::vector<double> values, std::string name) {
    return TimeSeries(std::move(values), 1, std::move(name));
}

WindowMatrix::WindowMatrix(std::vector<double> data, std::size_t rows, std::size_t cols,
                           WindowConfig config, std::size_t source_len)
    : data_(std::move(data)), rows_(rows), cols_(cols), config_(config), source_len_(source_len) {
    if (rows_ == 0 || cols_ == 0 || data_.size() != rows_ * cols_)
        throw std::invalid_argument("WindowMatrix: shape mismatch");
    require_finite(data_, "WindowMatrix");
    const std::size_t expect = (source_len_ - config_.length) / config_.stride + 1;
    if (rows_ != expect) throw std::invalid_argument("WindowMatrix: row count inconsistent with config");
}

ScoreSeries::ScoreSeries(std::vector<double> scores) : scores_(std::move(scores)) {
    require_finite(scores_, "ScoreSeries");
}

AlignedScores::AlignedScores(std::vector<double> scores) : scores_(std::move(scores)) {
    require_finite(scores_, "AlignedScores");
}

LabelSeries::LabelSeries(std::vector<int> labels) : labels_(std::move(labels)) {
    for (int v : labels_) {
        if (v != 0 && v != 1) throw std::invalid_argument("LabelSeries: labels must be 0/1");
    }
}

void validate_ranges(const std::vector<AnomalyRange>& ranges, std::size_t n) {
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const auto& r = ranges[i];
        if (r.start > r.end || r.end >= n) throw std::invalid_argument("AnomalyRange out of bounds");
        if (i > 0 && ranges[i - 1].end + 1 > r.start)
            throw std::invalid_argument("AnomalyRange set not sorted/disjoint");
    }
}

LabelSeries ranges_to_labels(const std::vector<AnomalyRange>& ranges, std::size_t n) {
    validate_ranges(ranges, n);
    std::vector<int> labels(n, 0);
    for (const auto& r : ranges) {
        for (std::size_t i = r.start; i <= r.end; ++i) labels[i] = 1;
    }
    return LabelSeries(std::move(labels));
}

std::vector<AnomalyRange> labels_to_ranges(const LabelSeries& labels) {
    std::vector<AnomalyRange> out;
    const std::size_t n = labels.size();
    std::size_t i = 0;
    while (i < n) {
        if (labels[i] == 1) {
            std::size_t j = i;
            while (j + 1 < n && labels[j + 1] == 1) ++j;
            out.push_back({i, j});
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace tsad
