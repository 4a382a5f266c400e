#pragma once

#include <utility>

#include "tsad/core.hpp"

namespace tsad {

/// Health indicators in [0,1]; values >= threshold mark anomalies.
using HealthSeries = AlignedScores;

/// Validation-score statistics plus the erf-based decision function.
struct DecisionModel {
    double mu = 0.0;
    double sigma = 1.0;  // floored at 1e-12
    double threshold = 0.0;
};

/// T = 1 - (1 - erf(2/sqrt(2))) / 2, the normal CDF at two sigma.
double default_threshold();

/// mu = sample mean, sigma = population standard deviation (floored at 1e-12).
DecisionModel learn_decision(const AlignedScores& validation_scores,
                             double threshold_override = -1.0);

/// max((erf((a - mu - sigma) / (sqrt(2) sigma)) - 0.5) * 2, 0)
double decide(const DecisionModel& model, double a_hat);

/// Per-point health indicators and their binarization at the threshold.
std::pair<HealthSeries, LabelSeries> health_series(const DecisionModel& model,
                                                   const AlignedScores& scores);

}  // namespace tsad
