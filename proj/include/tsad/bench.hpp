#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsad/datagen.hpp"
#include "tsad/detectors.hpp"
#include "tsad/difficulty.hpp"
#include "tsad/metrics.hpp"
#include "tsad/pipeline.hpp"

namespace tsad {

struct RunRecord {
    std::string bundle_id;
    std::string detector;
    WindowConfig window;
    std::size_t resolved_window_length = 0;
    std::optional<MetricRecord> metrics;  // absent on cell failure
    std::string error;                    // failure tag when metrics absent
    double wall_time_fit = 0.0;
    double wall_time_score = 0.0;
    double bundle_knc = 0.0;
    std::uint64_t seed = 0;
};

struct RankTable {
    std::vector<std::string> detectors;
    std::vector<std::string> bundles;
    // ranks[d][b]; ties share the mean of tied positions, rank 1 = best.
    std::vector<std::vector<double>> ranks;
    std::vector<double> mean_rank;
};

struct BenchOptions {
    std::vector<DetectorSpec> detectors;
    std::vector<WindowConfig> windows;
    double split_fraction = 0.7;
    MetricParams metric_params;
    std::uint64_t seed = 0;
};

std::vector<RunRecord> run_matrix(const std::vector<DatasetBundle>& bundles,
                                  const BenchOptions& options);

/// Mean metric per detector: window configs average within a bundle first,
/// then bundles average. Absent cells are excluded; counts report coverage.
struct AggregateRow {
    std::string detector;
    double mean = 0.0;
    std::size_t bundle_count = 0;
};
std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records,
                                    const std::string& metric);

RankTable rank_table(const std::vector<RunRecord>& records, const std::string& metric);

/// Friedman chi-square over the rank table plus its chi-square p-value.
struct FriedmanResult {
    double chi2 = 0.0;
    double p_value = 1.0;
};
FriedmanResult friedman(const RankTable& table);

/// Two-sided Wilcoxon signed-rank p-values per detector pair with Holm
/// step-down correction; exact enumeration up to 12 nonzero differences.
struct WilcoxonMatrix {
    std::vector<std::string> detectors;
    std::vector<std::vector<double>> p_raw;
    std::vector<std::vector<double>> p_holm;
};
WilcoxonMatrix wilcoxon_pairs(const std::vector<RunRecord>& records, const std::string& metric);

/// Two-sided signed-rank p for one difference vector (exported for tests).
double wilcoxon_signed_rank(const std::vector<double>& differences);

struct CdData {
    std::vector<std::string> detectors;  // sorted by mean rank, best first
    std::vector<double> mean_ranks;
    // Maximal groups of adjacent detectors with all pairwise Holm p >= alpha.
    std::vector<std::pair<std::size_t, std::size_t>> cliques;  // inclusive index spans
    double alpha = 0.05;
};
CdData cd_data(const RankTable& table, const WilcoxonMatrix& wilcoxon, double alpha = 0.05);

struct KncSlice {
    KncBand band;
    std::size_t bundle_count = 0;
    std::vector<AggregateRow> rows;
};
struct KncSliceReport {
    std::vector<KncSlice> slices;
    // 1 - min/max of a detector's per-band means.
    std::map<std::string, double> decline_ratio;
};
KncSliceReport knc_slices(const std::vector<RunRecord>& records, const std::string& metric);

struct TimingRow {
    std::string detector;
    double mean_seconds = 0.0;  // fit + full scoring
};
/// Mean wall time per detector over 3 seeded groups of 10 bundles (all
/// bundles when fewer than 30 exist).
std::vector<TimingRow> timing_report(const std::vector<RunRecord>& records, std::uint64_t seed);

/// Upper tail of the chi-square distribution (regularized incomplete gamma).
double chi2_sf(double x, double dof);
/// Upper tail of the standard normal.
double normal_sf(double z);

}  // namespace tsad
