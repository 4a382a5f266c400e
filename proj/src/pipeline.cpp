#include "tsad/pipeline.hpp"

#include <cmath>
#include <stdexcept>

namespace tsad {

TrainedPipeline::TrainedPipeline(Normalizer normalizer, WindowConfig window,
                                 std::shared_ptr<const FittedDetector> detector,
                                 DecisionModel decision)
    : normalizer_(std::move(normalizer)),
      window_(window),
      detector_(std::move(detector)),
      decision_(decision) {}

TestResult TrainedPipeline::test(const TimeSeries& test_series) const {
    if (test_series.size() < window_.length)
        throw std::invalid_argument("test: series shorter than window");
    const TimeSeries normalized = normalizer_.apply(test_series);
    const WindowMatrix windows = extract_windows(normalized, window_);
    const ScoreSeries raw = detector_->score(windows);
    AlignedScores aligned = dewindow(raw, window_, test_series.size());
    auto [health, labels] = health_series(decision_, aligned);
    return {std::move(aligned), std::move(health), std::move(labels)};
}

WindowConfig resolve_window(const TimeSeries& standard, const WindowConfig& cfg) {
    WindowConfig out = cfg;
    switch (cfg.selector) {
        case WindowSelector::Fixed:
            break;
        case WindowSelector::Acf:
            out.length = acf_window_length(standard, std::min<std::size_t>(standard.size() / 2, 256));
            break;
        case WindowSelector::Fft:
            out.length = fft_window_length(standard, 256);
            break;
    }
    out.length = std::min(out.length, standard.size());
    return out;
}

TrainedPipeline train(const TimeSeries& standard, const PipelineConfig& cfg) {
    if (cfg.split_fraction <= 0.0 || cfg.split_fraction >= 1.0)
        throw std::invalid_argument("train: split_fraction must lie in (0,1)");
    const std::size_t n = standard.size();
    const auto n_train = static_cast<std::size_t>(
        std::floor(cfg.split_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n) throw std::invalid_argument("train: series too short to split");

    const TimeSeries x_train = standard.slice(0, n_train);
    const TimeSeries x_valid = standard.slice(n_train, n - n_train);

    const WindowConfig window = resolve_window(x_train, cfg.window);
    if (window.length > x_train.size() || window.length > x_valid.size())
        throw std::invalid_argument("train: window longer than a split part");

    const Normalizer norm = fit_normalizer(x_train);
    const WindowMatrix y_train = extract_windows(norm.apply(x_train), window);
    const WindowMatrix y_valid = extract_windows(norm.apply(x_valid), window);

    DetectorSpec spec = cfg.detector;
    spec.seed = spec.seed == 0 ? cfg.seed : spec.seed;
    std::shared_ptr<const FittedDetector> det = fit(spec, y_train);

    const ScoreSeries valid_scores = det->score(y_valid);
    const AlignedScores aligned = dewindow(valid_scores, window, x_valid.size());
    const DecisionModel decision = learn_decision(aligned, cfg.threshold_override);

    return TrainedPipeline(norm, window, std::move(det), decision);
}

}  // namespace tsad
