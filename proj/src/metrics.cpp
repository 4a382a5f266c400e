#include "tsad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tsad {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("metrics: length mismatch");
}

double positional_weight(RangeBias bias, std::size_t pos, std::size_t len) {
    // pos is 0-based within a range of the given length.
    const double p = static_cast<double>(pos) + 1.0;
    const double l = static_cast<double>(len);
    switch (bias) {
        case RangeBias::Flat: return 1.0;
        case RangeBias::Front: return l - p + 1.0;
        case RangeBias::Back: return p;
        case RangeBias::Middle: return std::min(p, l - p + 1.0);
    }
    return 1.0;
}

/// omega(base, overlap): positional-bias-weighted fraction of `base` covered.
double overlap_reward(const AnomalyRange& base, const std::vector<AnomalyRange>& others,
                      RangeBias bias) {
    double total = 0.0, covered = 0.0;
    for (std::size_t i = base.start; i <= base.end; ++i) {
        const double w = positional_weight(bias, i - base.start, base.length());
        total += w;
        for (const auto& o : others) {
            if (i >= o.start && i <= o.end) {
                covered += w;
                break;
            }
        }
    }
    return total > 0.0 ? covered / total : 0.0;
}

std::size_t overlap_count(const AnomalyRange& base, const std::vector<AnomalyRange>& others) {
    std::size_t c = 0;
    for (const auto& o : others) {
        if (o.start <= base.end && o.end >= base.start) ++c;
    }
    return c;
}

double range_side(const std::vector<AnomalyRange>& bases, const std::vector<AnomalyRange>& others,
                  double alpha, RangeBias bias, bool reciprocal_cardinality) {
    if (bases.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& r : bases) {
        const std::size_t count = overlap_count(r, others);
        const double existence = count > 0 ? 1.0 : 0.0;
        double cardinality = 1.0;
        if (reciprocal_cardinality && count > 1) cardinality = 1.0 / static_cast<double>(count);
        acc += alpha * existence + (1.0 - alpha) * cardinality * overlap_reward(r, others, bias);
    }
    return acc / static_cast<double>(bases.size());
}

struct Group {
    double score;
    double pos;  // positive label mass in the group
    double neg;
};

/// Tie groups in descending score order with accumulated label mass.
std::vector<Group> tie_groups(const std::vector<double>& scores,
                              const std::vector<double>& pos_weight) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
    });
    std::vector<Group> groups;
    for (std::size_t i : order) {
        if (groups.empty() || groups.back().score != scores[i])
            groups.push_back({scores[i], 0.0, 0.0});
        groups.back().pos += pos_weight[i];
        groups.back().neg += 1.0 - pos_weight[i];
    }
    return groups;
}

}  // namespace

namespace detail {

double weighted_auc_roc(const std::vector<double>& scores, const std::vector<double>& pos_weight) {
    const auto groups = tie_groups(scores, pos_weight);
    double total_pos = 0.0, total_neg = 0.0;
    for (const auto& g : groups) {
        total_pos += g.pos;
        total_neg += g.neg;
    }
    if (total_pos <= 0.0 || total_neg <= 0.0)
        throw std::invalid_argument("auc_roc: need both positive and negative mass");
    double tp = 0.0, fp = 0.0, area = 0.0;
    for (const auto& g : groups) {
        // Trapezoid across the tie group: equivalent to counting 0.5 per tie.
        area += g.neg * (tp + g.pos / 2.0);
        tp += g.pos;
        fp += g.neg;
    }
    return area / (total_pos * total_neg);
}

double weighted_auc_pr(const std::vector<double>& scores, const std::vector<double>& pos_weight) {
    const auto groups = tie_groups(scores, pos_weight);
    double total_pos = 0.0;
    for (const auto& g : groups) total_pos += g.pos;
    if (total_pos <= 0.0) throw std::invalid_argument("auc_pr: no positive mass");
    double tp = 0.0, seen = 0.0, ap = 0.0;
    for (const auto& g : groups) {
        const double recall_old = tp / total_pos;
        tp += g.pos;
        seen += g.pos + g.neg;
        const double recall_new = tp / total_pos;
        const double precision = tp / seen;
        ap += (recall_new - recall_old) * precision;
    }
    return ap;
}

std::vector<double> relax_labels(const LabelSeries& truth, std::size_t buffer) {
    const std::size_t n = truth.size();
    std::vector<double> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = truth[i];
    if (buffer == 0) return labels;
    for (const auto& r : labels_to_ranges(truth)) {
        for (std::size_t j = 1; j <= buffer; ++j) {
            const double ramp =
                1.0 - static_cast<double>(j) / (static_cast<double>(buffer) + 1.0);
            if (r.start >= j) {
                const std::size_t i = r.start - j;
                labels[i] = std::min(1.0, std::max(labels[i], ramp));
            }
            if (r.end + j < n) {
                const std::size_t i = r.end + j;
                labels[i] = std::min(1.0, std::max(labels[i], ramp));
            }
        }
    }
    return labels;
}

}  // namespace detail

Prf point_prf(const LabelSeries& pred, const LabelSeries& truth) {
    check_lengths(pred.size(), truth.size());
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == 1 && truth[i] == 1) ++tp;
        if (pred[i] == 1 && truth[i] == 0) ++fp;
        if (pred[i] == 0 && truth[i] == 1) ++fn;
    }
    Prf out;
    out.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    out.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    out.f1 = out.precision + out.recall > 0.0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

double range_f1(const LabelSeries& pred, const LabelSeries& truth, const RangeF1Params& params) {
    check_lengths(pred.size(), truth.size());
    const auto pred_ranges = labels_to_ranges(pred);
    const auto truth_ranges = labels_to_ranges(truth);
    if (pred_ranges.empty() && truth_ranges.empty()) return 1.0;  // nothing to find, nothing claimed
    const double recall = range_side(truth_ranges, pred_ranges, params.alpha_recall, params.bias,
                                     params.reciprocal_cardinality);
    const double precision = range_side(pred_ranges, truth_ranges, params.alpha_precision,
                                        params.bias, params.reciprocal_cardinality);
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

double auc_roc(const AlignedScores& scores, const LabelSeries& truth) {
    check_lengths(scores.size(), truth.size());
    std::vector<double> w(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) w[i] = truth[i];
    return detail::weighted_auc_roc(scores.values(), w);
}

double auc_pr(const AlignedScores& scores, const LabelSeries& truth) {
    check_lengths(scores.size(), truth.size());
    std::vector<double> w(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) w[i] = truth[i];
    return detail::weighted_auc_pr(scores.values(), w);
}

double vus(const AlignedScores& scores, const LabelSeries& truth, std::size_t max_buffer,
           VusKind kind) {
    check_lengths(scores.size(), truth.size());
    double acc = 0.0;
    for (std::size_t l = 0; l <= max_buffer; ++l) {
        const auto labels = detail::relax_labels(truth, l);
        acc += kind == VusKind::Roc ? detail::weighted_auc_roc(scores.values(), labels)
                                    : detail::weighted_auc_pr(scores.values(), labels);
    }
    return acc / static_cast<double>(max_buffer + 1);
}

MetricRecord evaluate_all(const AlignedScores& scores, const LabelSeries& pred,
                          const LabelSeries& truth, const MetricParams& params) {
    MetricRecord rec;
    const Prf prf = point_prf(pred, truth);
    rec.precision = prf.precision;
    rec.recall = prf.recall;
    rec.f1 = prf.f1;
    rec.range_f1 = range_f1(pred, truth, params.range_f1);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < truth.size(); ++i) (truth[i] == 1 ? has_pos : has_neg) = true;
    if (has_pos && has_neg) {
        rec.auc_roc = auc_roc(scores, truth);
        rec.auc_pr = auc_pr(scores, truth);
        rec.vus_roc = vus(scores, truth, params.vus_buffer, VusKind::Roc);
        rec.vus_pr = vus(scores, truth, params.vus_buffer, VusKind::Pr);
    }
    return rec;
}

std::optional<double> MetricRecord::by_name(const std::string& name) const {
    if (name == "precision") return precision;
    if (name == "recall") return recall;
    if (name == "f1") return f1;
    if (name == "range_f1") return range_f1;
    if (name == "auc_roc") return auc_roc;
    if (name == "auc_pr") return auc_pr;
    if (name == "vus_roc") return vus_roc;
    if (name == "vus_pr") return vus_pr;
    throw std::invalid_argument("unknown metric: " + name);
}

const std::vector<std::string>& MetricRecord::names() {
    static const std::vector<std::string> kNames = {"precision", "recall",  "f1",      "range_f1",
                                                    "auc_roc",   "auc_pr", "vus_roc", "vus_pr"};
    return kNames;
}

}  // namespace tsad
