#include "tsad/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "tsad/difficulty.hpp"

namespace tsad {

namespace {

double waveform(std::size_t family, double phase, double progress) {
    const double two_pi = 2.0 * std::numbers::pi;
    switch (family % 4) {
        case 0: return std::sin(two_pi * phase);
        case 1: return std::sin(two_pi * phase) >= 0.0 ? 1.0 : -1.0;  // square
        case 2: return 2.0 * (phase - std::floor(phase)) - 1.0;       // sawtooth
        default: return std::sin(two_pi * phase * (1.0 + 0.5 * progress));  // chirp
    }
}

std::vector<Sequence> collect(const std::vector<Sequence>& instances,
                              const std::vector<std::size_t>& ids) {
    std::vector<Sequence> out;
    for (std::size_t i : ids) out.push_back(instances[i]);
    return out;
}

TimeSeries concat(const std::vector<Sequence>& segments, const std::string& name) {
    std::vector<double> values;
    for (const auto& s : segments) values.insert(values.end(), s.begin(), s.end());
    return TimeSeries::univariate(std::move(values), name);
}

}  // namespace

CategoricalDataset generate_synthetic_categorical(std::size_t n_classes, std::size_t per_class,
                                                  std::size_t m, double noise_sigma,
                                                  std::uint64_t seed) {
    if (n_classes < 2) throw std::invalid_argument("generate_synthetic_categorical: need >= 2 classes");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    CategoricalDataset out;
    for (std::size_t c = 0; c < n_classes; ++c) {
        const double period = static_cast<double>(m) / (3.0 + static_cast<double>(c));
        const double amplitude = 0.8 + 0.1 * static_cast<double>(c % 3);
        for (std::size_t i = 0; i < per_class; ++i) {
            Sequence s(m);
            for (std::size_t t = 0; t < m; ++t) {
                const double phase = static_cast<double>(t) / period;
                const double progress = static_cast<double>(t) / static_cast<double>(m);
                s[t] = amplitude * waveform(c, phase, progress) + noise_sigma * noise(rng);
            }
            out.instances.push_back(std::move(s));
            out.labels.push_back(static_cast<int>(c));
        }
    }
    return out;
}

DatasetBundle build_bundle(const CategoricalDataset& data, int source_class,
                           const BundleParams& params) {
    std::vector<std::size_t> class_ids;
    std::vector<std::size_t> other_ids;
    for (std::size_t i = 0; i < data.instances.size(); ++i) {
        (data.labels[i] == source_class ? class_ids : other_ids).push_back(i);
    }
    if (class_ids.size() < 4)
        throw std::invalid_argument("build_bundle: source class needs >= 4 instances");
    if (other_ids.empty()) throw std::invalid_argument("build_bundle: no other classes");

    // Cluster the source class; the tightest cluster becomes the baseline.
    const auto class_seqs = collect(data.instances, class_ids);
    const auto clustering =
        sbd_kmeans(class_seqs, std::min(params.k_clusters, class_seqs.size()), params.seed);
    // Most concentrated cluster, restricted to clusters big enough to split
    // into standard and test halves; near-duplicate shapes otherwise let a
    // degenerate singleton win on intra distance alone.
    std::size_t chosen = clustering.centroids.size();
    for (std::size_t c = 0; c < clustering.centroids.size(); ++c) {
        if (clustering.sizes[c] < 4) continue;
        if (chosen == clustering.centroids.size() || clustering.intra[c] < clustering.intra[chosen] ||
            (clustering.intra[c] == clustering.intra[chosen] &&
             clustering.sizes[c] > clustering.sizes[chosen]))
            chosen = c;
    }
    if (chosen == clustering.centroids.size())
        throw std::invalid_argument("build_bundle: baseline cluster too small");

    std::vector<std::size_t> baseline_ids;
    for (std::size_t i = 0; i < class_ids.size(); ++i) {
        if (clustering.assignments[i] == chosen) baseline_ids.push_back(class_ids[i]);
    }
    std::mt19937_64 rng(params.seed);
    std::shuffle(baseline_ids.begin(), baseline_ids.end(), rng);

    const std::size_t n_std = (baseline_ids.size() + 1) / 2;
    const std::size_t n_test_normal = baseline_ids.size() - n_std;
    if (n_std < 2 || n_test_normal < 2)
        throw std::invalid_argument("build_bundle: baseline cluster too small");

    std::vector<std::size_t> std_ids(baseline_ids.begin(),
                                     baseline_ids.begin() + static_cast<std::ptrdiff_t>(n_std));
    std::vector<std::size_t> normal_ids(baseline_ids.begin() + static_cast<std::ptrdiff_t>(n_std),
                                        baseline_ids.end());

    // Mean SBD of each outside-class candidate to the baseline set.
    const auto baseline_seqs = collect(data.instances, baseline_ids);
    std::vector<std::pair<double, std::size_t>> candidates;
    for (std::size_t id : other_ids) {
        double mean = 0.0;
        for (const auto& b : baseline_seqs) mean += sbd(data.instances[id], b);
        candidates.emplace_back(mean / static_cast<double>(baseline_seqs.size()), id);
    }
    std::sort(candidates.begin(), candidates.end());

    std::size_t anomaly_count = params.anomaly_count;
    if (anomaly_count == 0)
        anomaly_count = (n_test_normal + 9) / 10;  // 10% of test instances, rounded up

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double q = candidates.size() > 1
                             ? static_cast<double>(i) / static_cast<double>(candidates.size() - 1)
                             : 0.5;
        if (q >= params.band_lo && q <= params.band_hi) eligible.push_back(candidates[i].second);
    }
    if (eligible.size() < anomaly_count)
        throw std::invalid_argument("build_bundle: not enough candidates in the distance band");
    std::shuffle(eligible.begin(), eligible.end(), rng);
    eligible.resize(anomaly_count);

    // Assemble the test series: normals in shuffled-half order, anomalies
    // inserted whole at random instance boundaries.
    std::vector<std::size_t> test_order = normal_ids;
    std::vector<int> test_flags(test_order.size(), 0);
    for (std::size_t id : eligible) {
        std::uniform_int_distribution<std::size_t> pos_dist(0, test_order.size());
        const std::size_t pos = pos_dist(rng);
        test_order.insert(test_order.begin() + static_cast<std::ptrdiff_t>(pos), id);
        test_flags.insert(test_flags.begin() + static_cast<std::ptrdiff_t>(pos), 1);
    }

    const std::size_t m = data.instance_length();
    DatasetBundle bundle{concat(collect(data.instances, std_ids), "standard"),
                         concat(collect(data.instances, test_order), "test"),
                         {},
                         {}};
    for (std::size_t i = 0; i < test_flags.size(); ++i) {
        if (test_flags[i] == 1) bundle.truth.push_back({i * m, (i + 1) * m - 1});
    }

    bundle.meta.id = "class" + std::to_string(source_class) + "-seed" + std::to_string(params.seed);
    bundle.meta.source_class = source_class;
    bundle.meta.chosen_cluster = chosen;
    bundle.meta.instance_length = m;
    bundle.meta.anomaly_instance_ids = eligible;
    bundle.meta.seed = params.seed;
    bundle.meta.standard_instances = n_std;
    bundle.meta.test_instance_flags = test_flags;

    SequenceSets sets;
    sets.std_set = bundle.standard_segments();
    sets.nor_set = bundle.normal_test_segments();
    sets.ano_set = bundle.anomaly_test_segments();
    sets.k = std::min(params.knc_k, sets.std_set.size());
    bundle.meta.knc = knc(sets);
    return bundle;
}

namespace {

std::vector<Sequence> segments_of(const TimeSeries& series, std::size_t m) {
    std::vector<Sequence> out;
    for (std::size_t i = 0; i + m <= series.size(); i += m) {
        Sequence s(m);
        for (std::size_t t = 0; t < m; ++t) s[t] = series.at(i + t, 0);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::vector<Sequence> DatasetBundle::standard_segments() const {
    return segments_of(standard, meta.instance_length);
}

std::vector<Sequence> DatasetBundle::normal_test_segments() const {
    auto all = segments_of(test, meta.instance_length);
    std::vector<Sequence> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (meta.test_instance_flags[i] == 0) out.push_back(std::move(all[i]));
    }
    return out;
}

std::vector<Sequence> DatasetBundle::anomaly_test_segments() const {
    auto all = segments_of(test, meta.instance_length);
    std::vector<Sequence> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (meta.test_instance_flags[i] == 1) out.push_back(std::move(all[i]));
    }
    return out;
}

bool quality_filter_keep(const std::map<std::string, double>& auc_by_detector, double floor) {
    if (auc_by_detector.empty()) throw std::invalid_argument("quality_filter: empty results");
    for (const auto& [name, auc] : auc_by_detector) {
        if (auc >= floor) return true;
    }
    return false;
}

}  // namespace tsad
