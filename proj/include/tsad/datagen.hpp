#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tsad/core.hpp"
#include "tsad/shapedist.hpp"

namespace tsad {

struct CategoricalDataset {
    std::vector<Sequence> instances;  // equal length m
    std::vector<int> labels;

    std::size_t instance_length() const { return instances.empty() ? 0 : instances[0].size(); }
};

struct BundleMeta {
    std::string id;
    int source_class = 0;
    std::size_t chosen_cluster = 0;
    std::size_t instance_length = 0;
    std::vector<std::size_t> anomaly_instance_ids;  // indices into the source dataset
    std::uint64_t seed = 0;
    double knc = 0.0;
    std::size_t standard_instances = 0;
    std::vector<int> test_instance_flags;  // per test instance, 1 = injected anomaly
};

struct DatasetBundle {
    TimeSeries standard;
    TimeSeries test;
    std::vector<AnomalyRange> truth;
    BundleMeta meta;

    LabelSeries truth_labels() const { return ranges_to_labels(truth, test.size()); }

    /// Instance-aligned segments for the difficulty metrics.
    std::vector<Sequence> standard_segments() const;
    std::vector<Sequence> normal_test_segments() const;
    std::vector<Sequence> anomaly_test_segments() const;
};

struct BundleParams {
    std::size_t k_clusters = 3;
    std::size_t anomaly_count = 0;  // 0 means 10% of test instances, rounded up
    double band_lo = 0.25;          // quantile band over candidate mean-SBDs
    double band_hi = 0.75;
    std::size_t knc_k = 5;
    std::uint64_t seed = 0;
};

/// Waveform-family stand-in for categorical time-series corpora: each class is
/// a periodic waveform with class-specific shape, period and amplitude, plus
/// i.i.d. Gaussian noise.
CategoricalDataset generate_synthetic_categorical(std::size_t n_classes, std::size_t per_class,
                                                  std::size_t m, double noise_sigma,
                                                  std::uint64_t seed);

DatasetBundle build_bundle(const CategoricalDataset& data, int source_class,
                           const BundleParams& params);

/// Keep a bundle iff any detector reaches the AUC-ROC floor.
bool quality_filter_keep(const std::map<std::string, double>& auc_by_detector,
                         double floor = 0.8);

}  // namespace tsad
