#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsad/bench.hpp"

namespace tsad {

/// One RunRecord per row, fixed column order; lossless round-trip.
std::string records_to_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_csv(const std::string& content);
std::string records_to_json(const std::vector<RunRecord>& records);
std::vector<RunRecord> records_from_json(const std::string& content);

/// Markdown: per-detector table over all eight measures, rank statistics,
/// significance tests, difficulty slices and timing.
std::string markdown_report(const std::vector<RunRecord>& records,
                            const std::string& rank_metric = "auc_roc",
                            std::uint64_t timing_seed = 0);

/// Box-and-whisker plot of per-bundle ranks, one box per detector.
std::string rank_boxplot_svg(const RankTable& table);

/// Mean-rank axis with bars joining cliques of non-significant detectors.
std::string cd_diagram_svg(const CdData& cd);

/// Writes report.md, rank_boxplot.svg and cd_diagram.svg into out_dir.
void write_report_files(const std::vector<RunRecord>& records,
                        const std::filesystem::path& out_dir,
                        const std::string& rank_metric = "auc_roc",
                        std::uint64_t timing_seed = 0);

}  // namespace tsad
