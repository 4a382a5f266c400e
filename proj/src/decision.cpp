#include "tsad/decision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsad {

namespace {
constexpr double kSigmaFloor = 1e-12;
}

double default_threshold() { return 1.0 - (1.0 - std::erf(2.0 / std::sqrt(2.0))) / 2.0; }

DecisionModel learn_decision(const AlignedScores& validation_scores, double threshold_override) {
    const std::size_t n = validation_scores.size();
    if (n < 2) throw std::invalid_argument("learn_decision: need >= 2 validation points");
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += validation_scores[i];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = validation_scores[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    DecisionModel model;
    model.mu = mean;
    model.sigma = std::max(std::sqrt(var), kSigmaFloor);
    model.threshold = threshold_override >= 0.0 ? threshold_override : default_threshold();
    return model;
}

double decide(const DecisionModel& model, double a_hat) {
    const double z = (a_hat - model.mu - model.sigma) / (std::sqrt(2.0) * model.sigma);
    return std::max((std::erf(z) - 0.5) * 2.0, 0.0);
}

std::pair<HealthSeries, LabelSeries> health_series(const DecisionModel& model,
                                                   const AlignedScores& scores) {
    const std::size_t n = scores.size();
    std::vector<double> health(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        health[i] = decide(model, scores[i]);
        labels[i] = health[i] >= model.threshold ? 1 : 0;
    }
    return {HealthSeries(std::move(health)), LabelSeries(std::move(labels))};
}

}  // namespace tsad
