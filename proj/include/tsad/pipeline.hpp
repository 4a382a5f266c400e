#pragma once

#include <memory>

#include "tsad/core.hpp"
#include "tsad/decision.hpp"
#include "tsad/detectors.hpp"
#include "tsad/preprocess.hpp"

namespace tsad {

struct PipelineConfig {
    WindowConfig window;
    DetectorSpec detector;
    double split_fraction = 0.7;
    std::uint64_t seed = 0;
    double threshold_override = -1.0;  // negative keeps the default threshold
};

struct TestResult {
    AlignedScores scores;
    HealthSeries health;
    LabelSeries labels;
};

/// Trained bundle: normalizer, resolved window config, fitted detector and the
/// learned decision model.
class TrainedPipeline {
public:
    TrainedPipeline(Normalizer normalizer, WindowConfig window,
                    std::shared_ptr<const FittedDetector> detector, DecisionModel decision);

    TestResult test(const TimeSeries& test_series) const;

    const Normalizer& normalizer() const { return normalizer_; }
    const WindowConfig& window() const { return window_; }
    const FittedDetector& detector() const { return *detector_; }
    const DecisionModel& decision() const { return decision_; }

private:
    Normalizer normalizer_;
    WindowConfig window_;
    std::shared_ptr<const FittedDetector> detector_;
    DecisionModel decision_;
};

/// Full training procedure: contiguous train/validation split, train-only
/// normalizer fit, windowing, detector fit, validation scoring, de-windowing
/// and decision-model estimation.
TrainedPipeline train(const TimeSeries& standard, const PipelineConfig& cfg);

/// Resolves Acf/Fft selectors against the training portion of the series.
WindowConfig resolve_window(const TimeSeries& standard, const WindowConfig& cfg);

}  // namespace tsad
