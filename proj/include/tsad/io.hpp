#pragma once

#include <filesystem>
#include <string>

#include "tsad/core.hpp"
#include "tsad/datagen.hpp"

namespace tsad {

/// Writes content to a temp file in the target directory, then renames.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// CSV with a `dim0,dim1,...` header, one point per line.
std::string series_to_csv(const TimeSeries& series);
TimeSeries series_from_csv(const std::string& content, const std::string& name = "");
TimeSeries load_series_csv(const std::filesystem::path& path);

std::string labels_to_csv(const LabelSeries& labels);
LabelSeries labels_from_csv(const std::string& content);
LabelSeries load_labels_csv(const std::filesystem::path& path);

/// One aligned score per line under a `score` header.
std::string scores_to_csv(const AlignedScores& scores);

/// Bundle directory: standard.csv, test.csv, labels.csv, meta.json.
void save_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir);
DatasetBundle load_bundle(const std::filesystem::path& dir);

/// Stable-key-order serialization; re-serialization is byte-identical.
std::string meta_to_json(const BundleMeta& meta);
BundleMeta meta_from_json(const std::string& content);

/// UCR-style categorical CSV: label in the first column, values after.
CategoricalDataset load_categorical_csv(const std::filesystem::path& path);

}  // namespace tsad
