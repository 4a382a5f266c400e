#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "tsad/bench.hpp"
#include "tsad/report.hpp"

using namespace tsad;

namespace {

RunRecord record(const std::string& bundle, const std::string& detector, double auc,
                 double knc_value = 3.0) {
    RunRecord r;
    r.bundle_id = bundle;
    r.detector = detector;
    r.window = {32, 1, WindowSelector::Fixed};
    r.resolved_window_length = 32;
    MetricRecord m;
    m.precision = m.recall = m.f1 = m.range_f1 = auc;
    m.auc_roc = m.auc_pr = m.vus_roc = m.vus_pr = auc;
    r.metrics = m;
    r.bundle_knc = knc_value;
    return r;
}

std::vector<DatasetBundle> two_bundles() {
    const auto data = generate_synthetic_categorical(4, 40, 64, 0.05, 3);
    BundleParams p;
    p.seed = 1;
    std::vector<DatasetBundle> bundles;
    bundles.push_back(build_bundle(data, 0, p));
    p.seed = 2;
    bundles.push_back(build_bundle(data, 1, p));
    return bundles;
}

}  // namespace

TEST_CASE("run matrix produces one record per cell") {
    BenchOptions opt;
    opt.detectors = {{DetectorId::Knn, {}, 0}, {DetectorId::Hbos, {}, 0},
                     {DetectorId::KMeans, {}, 0}};
    opt.windows = {{16, 1, WindowSelector::Fixed}, {32, 1, WindowSelector::Fixed}};
    opt.seed = 4;
    const auto bundles = two_bundles();
    const auto records = run_matrix(bundles, opt);
    CHECK(records.size() == 12);  // 2 bundles x 3 detectors x 2 windows
    for (const auto& r : records) {
        CAPTURE(r.detector);
        REQUIRE(r.metrics.has_value());
        REQUIRE(r.error.empty());
        REQUIRE(r.wall_time_fit >= 0.0);
        REQUIRE(r.wall_time_score >= 0.0);
    }
    // Determinism: metric values identical across reruns.
    const auto again = run_matrix(bundles, opt);
    for (std::size_t i = 0; i < records.size(); ++i)
        REQUIRE(records[i].metrics->auc_roc == again[i].metrics->auc_roc);
}

TEST_CASE("cell failures are captured, not propagated") {
    BenchOptions opt;
    opt.detectors = {{DetectorId::Knn, {}, 0}};
    opt.windows = {{16, 1, WindowSelector::Fixed}, {100000, 1, WindowSelector::Fixed}};
    const auto bundles = two_bundles();
    const auto records = run_matrix(bundles, opt);
    REQUIRE(records.size() == 4);
    CHECK(records[0].metrics.has_value());
    CHECK(!records[1].metrics.has_value());
    CHECK(!records[1].error.empty());
}

TEST_CASE("aggregate averages windows before bundles") {
    // Bundle a has two window cells (0.8, 0.6) -> 0.7; bundle b has one (0.9).
    std::vector<RunRecord> records = {record("a", "KNN", 0.8), record("a", "KNN", 0.6),
                                      record("b", "KNN", 0.9)};
    const auto rows = aggregate(records, "auc_roc");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean == doctest::Approx(0.8));  // (0.7 + 0.9) / 2
    CHECK(rows[0].bundle_count == 2);
}

TEST_CASE("aggregate is permutation invariant and skips absent cells") {
    std::vector<RunRecord> records = {record("a", "KNN", 0.8), record("b", "KNN", 0.4)};
    RunRecord failed;
    failed.bundle_id = "c";
    failed.detector = "KNN";
    failed.error = "boom";
    records.push_back(failed);
    const auto rows = aggregate(records, "auc_roc");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean == doctest::Approx(0.6));
    CHECK(rows[0].bundle_count == 2);

    std::reverse(records.begin(), records.end());
    CHECK(aggregate(records, "auc_roc")[0].mean == doctest::Approx(0.6));
}

TEST_CASE("rank table basics and tie handling") {
    std::vector<RunRecord> records = {record("a", "X", 0.9), record("a", "Y", 0.8),
                                      record("a", "Z", 0.7), record("b", "X", 0.9),
                                      record("b", "Y", 0.9), record("b", "Z", 0.7)};
    const auto table = rank_table(records, "auc_roc");
    REQUIRE(table.detectors == std::vector<std::string>{"X", "Y", "Z"});
    REQUIRE(table.bundles.size() == 2);
    CHECK(table.ranks[0][0] == 1.0);
    CHECK(table.ranks[1][0] == 2.0);
    CHECK(table.ranks[2][0] == 3.0);
    CHECK(table.ranks[0][1] == 1.5);  // tie shares mean position
    CHECK(table.ranks[1][1] == 1.5);
    CHECK(table.ranks[2][1] == 3.0);
    // Rows sum to k(k+1)/2 per bundle.
    for (std::size_t b = 0; b < 2; ++b) {
        double sum = 0.0;
        for (std::size_t d = 0; d < 3; ++d) sum += table.ranks[d][b];
        CHECK(sum == doctest::Approx(6.0));
    }
    CHECK(table.mean_rank[0] == doctest::Approx(1.25));
}

TEST_CASE("friedman hand case and degenerate case") {
    std::vector<RunRecord> records;
    for (int b = 0; b < 10; ++b) {
        records.push_back(record("b" + std::to_string(b), "X", 0.9));
        records.push_back(record("b" + std::to_string(b), "Y", 0.8));
    }
    const auto result = friedman(rank_table(records, "auc_roc"));
    CHECK(result.chi2 == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(result.p_value == doctest::Approx(chi2_sf(10.0, 1.0)).epsilon(1e-12));
    CHECK(result.p_value < 0.01);

    // All ties -> chi2 0, p 1.
    std::vector<RunRecord> tied;
    for (int b = 0; b < 5; ++b) {
        tied.push_back(record("b" + std::to_string(b), "X", 0.5));
        tied.push_back(record("b" + std::to_string(b), "Y", 0.5));
    }
    const auto flat = friedman(rank_table(tied, "auc_roc"));
    CHECK(flat.chi2 == doctest::Approx(0.0));
    CHECK(flat.p_value == doctest::Approx(1.0));
}

TEST_CASE("chi-square tail matches reference values") {
    // scipy.stats.chi2.sf reference points.
    CHECK(chi2_sf(10.0, 1.0) == doctest::Approx(0.0015654022580025).epsilon(1e-6));
    CHECK(chi2_sf(3.0, 2.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-9));
    CHECK(chi2_sf(5.0, 5.0) == doctest::Approx(0.4158801869955079).epsilon(1e-6));
}

TEST_CASE("wilcoxon exact hand case") {
    CHECK(wilcoxon_signed_rank({0.1, 0.2, 0.3, 0.4, 0.5}) == doctest::Approx(2.0 / 32.0));
    CHECK(wilcoxon_signed_rank({}) == 1.0);
    CHECK(wilcoxon_signed_rank({0.0, 0.0}) == 1.0);  // zeros dropped
}

TEST_CASE("wilcoxon exact equals full enumeration up to n=12") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t n = 4; n <= 12; ++n) {
        std::vector<double> d(n);
        for (auto& v : d) v = dist(rng);
        const double p = wilcoxon_signed_rank(d);
        // Independent enumeration: signed-rank statistic over all 2^n signs.
        std::vector<double> mag(n);
        for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(d[i]);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return mag[a] < mag[b]; });
        std::vector<double> rank(n);
        for (std::size_t pos = 0; pos < n; ++pos) rank[idx[pos]] = static_cast<double>(pos + 1);
        double w_plus = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (d[i] > 0) w_plus += rank[i];
        const double total = static_cast<double>(n * (n + 1)) / 2.0;
        const double w_obs = std::min(w_plus, total - w_plus);
        std::size_t count = 0;
        for (std::size_t mask = 0; mask < (1ULL << n); ++mask) {
            double w = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1ULL << i)) w += rank[i];
            if (std::min(w, total - w) <= w_obs + 1e-12) ++count;
        }
        const double oracle = static_cast<double>(count) / static_cast<double>(1ULL << n);
        REQUIRE(p == doctest::Approx(std::min(1.0, oracle)).epsilon(1e-12));
    }
}

TEST_CASE("wilcoxon branches agree near the crossover") {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> dist(0.3, 1.0);
    std::vector<double> d12(12), d13(13);
    for (auto& v : d12) v = dist(rng);
    for (std::size_t i = 0; i < 12; ++i) d13[i] = d12[i];
    d13[12] = 1e-9;  // tiny 13th value pushes into the normal branch
    const double exact = wilcoxon_signed_rank(d12);
    const double approx = wilcoxon_signed_rank(d13);
    CHECK(std::abs(exact - approx) < 0.02);
}

TEST_CASE("wilcoxon pairs and holm correction") {
    std::vector<RunRecord> records;
    for (int b = 0; b < 8; ++b) {
        const std::string id = "b" + std::to_string(b);
        records.push_back(record(id, "X", 0.9 + 0.001 * b));
        records.push_back(record(id, "Y", 0.5 + 0.001 * b));
        records.push_back(record(id, "Z", 0.5 + 0.001 * b));
    }
    const auto wx = wilcoxon_pairs(records, "auc_roc");
    REQUIRE(wx.detectors.size() == 3);
    const std::size_t x = 0, y = 1, z = 2;
    CHECK(wx.p_raw[x][y] < 0.05);
    CHECK(wx.p_raw[y][z] == 1.0);  // identical values, all differences drop as zeros
    CHECK(wx.p_holm[x][y] >= wx.p_raw[x][y]);
    CHECK(wx.p_holm[x][y] <= 1.0);
    // Symmetry and unit diagonal.
    CHECK(wx.p_raw[x][y] == wx.p_raw[y][x]);
    CHECK(wx.p_raw[x][x] == 1.0);
}

TEST_CASE("cd data cliques join non-significant neighbors") {
    RankTable table;
    table.detectors = {"X", "Y", "Z"};
    table.bundles = {"a", "b"};
    table.mean_rank = {1.0, 2.2, 2.8};
    WilcoxonMatrix wx;
    wx.detectors = {"X", "Y", "Z"};
    wx.p_raw = wx.p_holm = {{1.0, 0.001, 0.001}, {0.001, 1.0, 0.8}, {0.001, 0.8, 1.0}};
    const auto cd = cd_data(table, wx, 0.05);
    REQUIRE(cd.detectors == std::vector<std::string>{"X", "Y", "Z"});
    REQUIRE(cd.cliques.size() == 1);
    CHECK(cd.cliques[0] == std::pair<std::size_t, std::size_t>{1, 2});

    wx.p_holm = {{1.0, 0.001, 0.001}, {0.001, 1.0, 0.001}, {0.001, 0.001, 1.0}};
    CHECK(cd_data(table, wx, 0.05).cliques.empty());

    wx.p_holm = {{1.0, 0.8, 0.8}, {0.8, 1.0, 0.8}, {0.8, 0.8, 1.0}};
    const auto all = cd_data(table, wx, 0.05);
    REQUIRE(all.cliques.size() == 1);
    CHECK(all.cliques[0] == std::pair<std::size_t, std::size_t>{0, 2});
}

TEST_CASE("knc slices group by band with decline ratios") {
    std::vector<RunRecord> records = {record("a", "KNN", 0.9, 12.0), record("b", "KNN", 0.72, 1.5),
                                      record("a", "LOF", 0.8, 12.0), record("b", "LOF", 0.8, 1.5)};
    const auto report = knc_slices(records, "auc_roc");
    REQUIRE(report.slices.size() == 2);
    CHECK(report.decline_ratio.at("KNN") == doctest::Approx(1.0 - 0.72 / 0.9));
    CHECK(report.decline_ratio.at("LOF") == doctest::Approx(0.0));
    for (const auto& slice : report.slices) CHECK(slice.bundle_count == 1);
}

TEST_CASE("timing report is sorted and uses all bundles when few") {
    std::vector<RunRecord> records;
    auto slow = record("a", "SLOW", 0.5);
    slow.wall_time_fit = 2.0;
    slow.wall_time_score = 1.0;
    auto fast = record("a", "FAST", 0.5);
    fast.wall_time_fit = 0.1;
    fast.wall_time_score = 0.1;
    records = {slow, fast};
    const auto rows = timing_report(records, 0);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].detector == "FAST");
    CHECK(rows[1].detector == "SLOW");
    CHECK(rows[1].mean_seconds == doctest::Approx(3.0));
}

TEST_CASE("records round trip through csv and json") {
    BenchOptions opt;
    opt.detectors = {{DetectorId::Knn, {}, 0}};
    opt.windows = {{16, 1, WindowSelector::Fixed}, {100000, 1, WindowSelector::Fixed}};
    const auto records = run_matrix(two_bundles(), opt);

    const auto csv = records_to_csv(records);
    const auto from_csv = records_from_csv(csv);
    REQUIRE(from_csv.size() == records.size());
    CHECK(records_to_csv(from_csv) == csv);  // byte-stable re-serialization

    const auto json_text = records_to_json(records);
    const auto from_json = records_from_json(json_text);
    REQUIRE(from_json.size() == records.size());
    CHECK(records_to_json(from_json) == json_text);

    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(from_csv[i].bundle_id == records[i].bundle_id);
        CHECK(from_csv[i].metrics.has_value() == records[i].metrics.has_value());
        if (records[i].metrics)
            CHECK(from_csv[i].metrics->auc_roc == records[i].metrics->auc_roc);
        CHECK(from_json[i].error == records[i].error);
    }
}

TEST_CASE("report renders all sections") {
    BenchOptions opt;
    opt.detectors = {{DetectorId::Knn, {}, 0}, {DetectorId::Hbos, {}, 0}};
    opt.windows = {{16, 1, WindowSelector::Fixed}};
    const auto records = run_matrix(two_bundles(), opt);
    const auto md = markdown_report(records);
    for (const char* needle : {"## Accuracy", "## Ranks", "## Difficulty slices", "## Timing",
                               "precision", "vus_pr", "Friedman"})
        CHECK(md.find(needle) != std::string::npos);

    const auto table = rank_table(records, "auc_roc");
    const auto svg = rank_boxplot_svg(table);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("KNN") != std::string::npos);
    const auto cd_svg = cd_diagram_svg(cd_data(table, wilcoxon_pairs(records, "auc_roc")));
    CHECK(cd_svg.find("<svg") != std::string::npos);
}
