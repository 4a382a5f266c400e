#pragma once

#include <optional>
#include <vector>

#include "tsad/core.hpp"

namespace tsad {

enum class RangeBias { Flat, Front, Back, Middle };

struct RangeF1Params {
    double alpha_recall = 0.5;   // existence weight on the recall side
    double alpha_precision = 0;  // cited framework's recommendation
    RangeBias bias = RangeBias::Flat;
    bool reciprocal_cardinality = true;
};

enum class VusKind { Roc, Pr };

struct MetricParams {
    RangeF1Params range_f1;
    std::size_t vus_buffer = 16;
};

/// The eight accuracy measures; AUCs absent when truth is single-class.
struct MetricRecord {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double range_f1 = 0.0;
    std::optional<double> auc_roc;
    std::optional<double> auc_pr;
    std::optional<double> vus_roc;
    std::optional<double> vus_pr;

    std::optional<double> by_name(const std::string& name) const;
    static const std::vector<std::string>& names();
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

Prf point_prf(const LabelSeries& pred, const LabelSeries& truth);

double range_f1(const LabelSeries& pred, const LabelSeries& truth, const RangeF1Params& params = {});

/// Tie-correct Mann-Whitney AUC (trapezoidal over tie groups).
double auc_roc(const AlignedScores& scores, const LabelSeries& truth);

/// Average precision over descending-score prefix cuts.
double auc_pr(const AlignedScores& scores, const LabelSeries& truth);

/// Mean over buffer widths 0..L of the AUC against boundary-relaxed continuous
/// labels (linear ramps of width l around each truth range).
double vus(const AlignedScores& scores, const LabelSeries& truth, std::size_t max_buffer,
           VusKind kind);

MetricRecord evaluate_all(const AlignedScores& scores, const LabelSeries& pred,
                          const LabelSeries& truth, const MetricParams& params = {});

namespace detail {
/// Continuous-label generalization used by vus; binary weights reduce it to
/// the point measures exactly.
double weighted_auc_roc(const std::vector<double>& scores, const std::vector<double>& pos_weight);
double weighted_auc_pr(const std::vector<double>& scores, const std::vector<double>& pos_weight);
std::vector<double> relax_labels(const LabelSeries& truth, std::size_t buffer);
}  // namespace detail

}  // namespace tsad
