#include <set>

#include "doctest.h"
#include "tsad/datagen.hpp"
#include "tsad/shapedist.hpp"

using namespace tsad;

namespace {

BundleParams params_with(std::uint64_t seed, double lo = 0.25, double hi = 0.75) {
    BundleParams p;
    p.seed = seed;
    p.band_lo = lo;
    p.band_hi = hi;
    return p;
}

}  // namespace

TEST_CASE("synthetic classes are shape-separated") {
    const auto data = generate_synthetic_categorical(4, 20, 64, 0.05, 1);
    REQUIRE(data.instances.size() == 80);
    REQUIRE(data.instance_length() == 64);

    double within = 0.0, between = 0.0;
    std::size_t n_within = 0, n_between = 0;
    for (std::size_t i = 0; i < 40; ++i) {
        for (std::size_t j = i + 1; j < 40; ++j) {
            const double d = sbd(data.instances[i], data.instances[j]);
            if (data.labels[i] == data.labels[j]) {
                within += d;
                ++n_within;
            } else {
                between += d;
                ++n_between;
            }
        }
    }
    CHECK(between / static_cast<double>(n_between) > within / static_cast<double>(n_within));
}

TEST_CASE("bundle series are aligned to whole instances") {
    const auto data = generate_synthetic_categorical(4, 40, 64, 0.05, 2);
    const auto bundle = build_bundle(data, 0, params_with(5));
    const std::size_t m = bundle.meta.instance_length;
    CHECK(m == 64);
    CHECK(bundle.standard.size() % m == 0);
    CHECK(bundle.test.size() % m == 0);
    CHECK(bundle.standard.size() / m == bundle.meta.standard_instances);
    CHECK(bundle.test.size() / m == bundle.meta.test_instance_flags.size());

    // Truth ranges sit exactly on instance boundaries and match the flags.
    std::size_t flagged = 0;
    for (int f : bundle.meta.test_instance_flags) flagged += static_cast<std::size_t>(f);
    REQUIRE(bundle.truth.size() == flagged);
    for (const auto& r : bundle.truth) {
        CHECK(r.start % m == 0);
        CHECK(r.length() == m);
        CHECK(bundle.meta.test_instance_flags[r.start / m] == 1);
    }
}

TEST_CASE("standard and test normals are disjoint halves of the baseline") {
    const auto data = generate_synthetic_categorical(4, 40, 64, 0.05, 2);
    const auto bundle = build_bundle(data, 0, params_with(5));
    const std::size_t n_std = bundle.meta.standard_instances;
    const std::size_t n_normal = bundle.meta.test_instance_flags.size() - bundle.truth.size();
    // Split is ceil/floor of the baseline cluster size.
    CHECK(n_std >= n_normal);
    CHECK(n_std <= n_normal + 1);
    // Anomaly instances come from other classes.
    for (std::size_t id : bundle.meta.anomaly_instance_ids)
        CHECK(data.labels[id] != bundle.meta.source_class);
}

TEST_CASE("bundle generation is deterministic") {
    const auto data = generate_synthetic_categorical(4, 40, 64, 0.05, 7);
    const auto a = build_bundle(data, 1, params_with(11));
    const auto b = build_bundle(data, 1, params_with(11));
    CHECK(a.standard.raw() == b.standard.raw());
    CHECK(a.test.raw() == b.test.raw());
    CHECK(a.truth == b.truth);
    CHECK(a.meta.knc == b.meta.knc);

    const auto c = build_bundle(data, 1, params_with(12));
    CHECK(a.test.raw() != c.test.raw());
}

TEST_CASE("far band gives higher knc than near band") {
    const auto data = generate_synthetic_categorical(4, 40, 64, 0.05, 3);
    const auto far = build_bundle(data, 0, params_with(6, 0.9, 1.0));
    const auto near = build_bundle(data, 0, params_with(6, 0.0, 0.1));
    CHECK(far.meta.knc > near.meta.knc);
}

TEST_CASE("segment views reconstruct the instance sets") {
    const auto data = generate_synthetic_categorical(4, 40, 64, 0.05, 2);
    const auto bundle = build_bundle(data, 0, params_with(5));
    CHECK(bundle.standard_segments().size() == bundle.meta.standard_instances);
    CHECK(bundle.normal_test_segments().size() + bundle.anomaly_test_segments().size() ==
          bundle.meta.test_instance_flags.size());
    CHECK(bundle.anomaly_test_segments().size() == bundle.truth.size());
    // Each anomaly segment matches its source instance.
    const auto ano = bundle.anomaly_test_segments();
    for (const auto& seg : ano) {
        bool found = false;
        for (std::size_t id : bundle.meta.anomaly_instance_ids) found |= data.instances[id] == seg;
        CHECK(found);
    }
}

TEST_CASE("quality filter keeps on any auc at or above the floor") {
    CHECK(quality_filter_keep({{"KNN", 0.85}, {"LOF", 0.4}}, 0.8));
    CHECK(quality_filter_keep({{"KNN", 0.8}}, 0.8));  // boundary kept
    CHECK(!quality_filter_keep({{"KNN", 0.79}, {"LOF", 0.5}}, 0.8));
    CHECK_THROWS(quality_filter_keep({}, 0.8));  // empty result set is an error
}

TEST_CASE("anomaly_count zero means a tenth of the test instances") {
    const auto data = generate_synthetic_categorical(4, 40, 64, 0.05, 2);
    BundleParams p = params_with(5);
    const auto auto_count = build_bundle(data, 0, p);
    const std::size_t normals =
        auto_count.meta.test_instance_flags.size() - auto_count.truth.size();
    CHECK(auto_count.truth.size() == (normals + 9) / 10);

    p.anomaly_count = 3;
    CHECK(build_bundle(data, 0, p).truth.size() == 3);
}
