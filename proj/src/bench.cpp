#include "tsad/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace tsad {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t cell_seed(std::uint64_t global, const std::string& bundle, const std::string& detector,
                        const WindowConfig& w) {
    std::uint64_t h = 14695981039346656037ULL ^ global;
    h = fnv1a(h, bundle);
    h = fnv1a(h, detector);
    h = fnv1a(h, std::to_string(w.length) + ":" + std::to_string(w.stride) + ":" +
                      std::to_string(static_cast<int>(w.selector)));
    return h == 0 ? 1 : h;
}

/// Per-bundle per-detector mean metric value across window configs.
std::map<std::string, std::map<std::string, double>> bundle_detector_means(
    const std::vector<RunRecord>& records, const std::string& metric) {
    std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> acc;
    for (const auto& r : records) {
        if (!r.metrics) continue;
        const auto v = r.metrics->by_name(metric);
        if (!v) continue;
        auto& cell = acc[r.bundle_id][r.detector];
        cell.first += *v;
        cell.second += 1;
    }
    std::map<std::string, std::map<std::string, double>> out;
    for (const auto& [bundle, dets] : acc) {
        for (const auto& [det, sum] : dets)
            out[bundle][det] = sum.first / static_cast<double>(sum.second);
    }
    return out;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    // Rank 1 = largest value; ties share the mean of tied positions.
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

std::vector<RunRecord> run_matrix(const std::vector<DatasetBundle>& bundles,
                                  const BenchOptions& options) {
    if (bundles.empty() || options.detectors.empty() || options.windows.empty())
        throw std::invalid_argument("run_matrix: empty inputs");
    using clock = std::chrono::steady_clock;
    std::vector<RunRecord> out;
    for (const auto& bundle : bundles) {
        MetricParams params = options.metric_params;
        if (bundle.meta.instance_length >= 4)
            params.vus_buffer = bundle.meta.instance_length / 4;
        const LabelSeries truth = bundle.truth_labels();
        for (const auto& det : options.detectors) {
            for (const auto& window : options.windows) {
                RunRecord rec;
                rec.bundle_id = bundle.meta.id;
                rec.detector = detector_name(det.id);
                rec.window = window;
                rec.bundle_knc = bundle.meta.knc;
                rec.seed = cell_seed(options.seed, rec.bundle_id, rec.detector, window);
                try {
                    PipelineConfig cfg;
                    cfg.window = window;
                    cfg.detector = det;
                    cfg.detector.seed = rec.seed;
                    cfg.split_fraction = options.split_fraction;
                    cfg.seed = rec.seed;
                    const auto t0 = clock::now();
                    const TrainedPipeline tp = train(bundle.standard, cfg);
                    const auto t1 = clock::now();
                    const TestResult res = tp.test(bundle.test);
                    const auto t2 = clock::now();
                    rec.resolved_window_length = tp.window().length;
                    rec.wall_time_fit = std::chrono::duration<double>(t1 - t0).count();
                    rec.wall_time_score = std::chrono::duration<double>(t2 - t1).count();
                    rec.metrics = evaluate_all(res.scores, res.labels, truth, params);
                } catch (const std::exception& e) {
                    rec.error = e.what();
                }
                out.push_back(std::move(rec));
            }
        }
    }
    return out;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records,
                                    const std::string& metric) {
    const auto means = bundle_detector_means(records, metric);
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& [bundle, dets] : means) {
        for (const auto& [det, v] : dets) {
            acc[det].first += v;
            acc[det].second += 1;
        }
    }
    std::vector<AggregateRow> out;
    for (const auto& [det, sum] : acc)
        out.push_back({det, sum.first / static_cast<double>(sum.second), sum.second});
    std::sort(out.begin(), out.end(),
              [](const AggregateRow& a, const AggregateRow& b) { return a.mean > b.mean; });
    return out;
}

RankTable rank_table(const std::vector<RunRecord>& records, const std::string& metric) {
    const auto means = bundle_detector_means(records, metric);
    std::set<std::string> detector_set;
    for (const auto& [bundle, dets] : means) {
        for (const auto& [det, v] : dets) detector_set.insert(det);
    }
    RankTable table;
    table.detectors.assign(detector_set.begin(), detector_set.end());
    if (table.detectors.size() < 2) throw std::invalid_argument("rank_table: need >= 2 detectors");
    table.ranks.assign(table.detectors.size(), {});
    for (const auto& [bundle, dets] : means) {
        // Only bundles where every detector produced a value are rankable.
        if (dets.size() != table.detectors.size()) continue;
        std::vector<double> values;
        for (const auto& det : table.detectors) values.push_back(dets.at(det));
        const auto ranks = average_ranks(values);
        table.bundles.push_back(bundle);
        for (std::size_t d = 0; d < ranks.size(); ++d) table.ranks[d].push_back(ranks[d]);
    }
    table.mean_rank.assign(table.detectors.size(), 0.0);
    for (std::size_t d = 0; d < table.detectors.size(); ++d) {
        for (double r : table.ranks[d]) table.mean_rank[d] += r;
        if (!table.bundles.empty()) table.mean_rank[d] /= static_cast<double>(table.bundles.size());
    }
    return table;
}

FriedmanResult friedman(const RankTable& table) {
    const double k = static_cast<double>(table.detectors.size());
    const double n = static_cast<double>(table.bundles.size());
    if (k < 2 || n < 2) throw std::invalid_argument("friedman: need >= 2 detectors and bundles");
    double sum_sq = 0.0;
    for (double r : table.mean_rank) {
        const double d = r - (k + 1.0) / 2.0;
        sum_sq += d * d;
    }
    FriedmanResult res;
    res.chi2 = 12.0 * n / (k * (k + 1.0)) * sum_sq;
    res.p_value = chi2_sf(res.chi2, k - 1.0);
    return res;
}

double wilcoxon_signed_rank(const std::vector<double>& differences) {
    std::vector<double> d;
    for (double v : differences) {
        if (v != 0.0) d.push_back(v);
    }
    const std::size_t n = d.size();
    if (n == 0) return 1.0;

    std::vector<double> abs_d(n);
    for (std::size_t i = 0; i < n; ++i) abs_d[i] = std::abs(d[i]);
    const auto ranks = average_ranks(abs_d);  // rank 1 = largest |d|
    // Convert to ascending-magnitude ranks.
    std::vector<double> asc(n);
    for (std::size_t i = 0; i < n; ++i) asc[i] = static_cast<double>(n) + 1.0 - ranks[i];

    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] > 0.0) w_plus += asc[i];
    }
    const double total = static_cast<double>(n) * (static_cast<double>(n) + 1.0) / 2.0;
    const double w_small = std::min(w_plus, total - w_plus);

    if (n <= 12) {
        // Exact: enumerate all sign assignments.
        const std::size_t assignments = 1ULL << n;
        std::size_t count = 0;
        for (std::size_t mask = 0; mask < assignments; ++mask) {
            double w = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (1ULL << i)) w += asc[i];
            }
            const double ws = std::min(w, total - w);
            if (ws <= w_small + 1e-12) ++count;
        }
        // Counting min(W, total-W) <= w_small covers both tails, so no doubling.
        return std::min(1.0, static_cast<double>(count) / static_cast<double>(assignments));
    }

    // Normal approximation with tie correction and continuity correction.
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    double tie_term = 0.0;
    std::map<double, std::size_t> tie_counts;
    for (double r : asc) ++tie_counts[r];
    for (const auto& [r, c] : tie_counts) {
        if (c > 1) {
            const double t = static_cast<double>(c);
            tie_term += t * t * t - t;
        }
    }
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) return 1.0;
    const double z = (std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
    return std::min(1.0, 2.0 * normal_sf(z));
}

WilcoxonMatrix wilcoxon_pairs(const std::vector<RunRecord>& records, const std::string& metric) {
    const auto table = rank_table(records, metric);
    const auto means = bundle_detector_means(records, metric);

    WilcoxonMatrix out;
    out.detectors = table.detectors;
    const std::size_t k = out.detectors.size();
    out.p_raw.assign(k, std::vector<double>(k, 1.0));
    out.p_holm.assign(k, std::vector<double>(k, 1.0));

    struct PairP {
        std::size_t a, b;
        double p;
    };
    std::vector<PairP> pairs;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            std::vector<double> diffs;
            for (const auto& bundle : table.bundles) {
                const auto& dets = means.at(bundle);
                diffs.push_back(dets.at(out.detectors[a]) - dets.at(out.detectors[b]));
            }
            const double p = wilcoxon_signed_rank(diffs);
            out.p_raw[a][b] = out.p_raw[b][a] = p;
            pairs.push_back({a, b, p});
        }
    }
    // Holm step-down across all pairs.
    std::sort(pairs.begin(), pairs.end(), [](const PairP& x, const PairP& y) { return x.p < y.p; });
    const double m = static_cast<double>(pairs.size());
    double running = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double adj = std::min(1.0, (m - static_cast<double>(i)) * pairs[i].p);
        running = std::max(running, adj);
        out.p_holm[pairs[i].a][pairs[i].b] = out.p_holm[pairs[i].b][pairs[i].a] = running;
    }
    return out;
}

CdData cd_data(const RankTable& table, const WilcoxonMatrix& wilcoxon, double alpha) {
    CdData out;
    out.alpha = alpha;
    const std::size_t k = table.detectors.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return table.mean_rank[a] < table.mean_rank[b]; });

    std::vector<std::size_t> wilcoxon_index(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto it = std::find(wilcoxon.detectors.begin(), wilcoxon.detectors.end(),
                                  table.detectors[order[i]]);
        wilcoxon_index[i] = static_cast<std::size_t>(it - wilcoxon.detectors.begin());
    }
    for (std::size_t i = 0; i < k; ++i) {
        out.detectors.push_back(table.detectors[order[i]]);
        out.mean_ranks.push_back(table.mean_rank[order[i]]);
    }

    auto connected = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t a = lo; a <= hi; ++a) {
            for (std::size_t b = a + 1; b <= hi; ++b) {
                if (wilcoxon.p_holm[wilcoxon_index[a]][wilcoxon_index[b]] < alpha) return false;
            }
        }
        return true;
    };
    std::size_t prev_hi = 0;
    for (std::size_t lo = 0; lo < k; ++lo) {
        std::size_t hi = lo;
        while (hi + 1 < k && connected(lo, hi + 1)) ++hi;
        if (hi > lo && (out.cliques.empty() || hi > prev_hi)) {
            out.cliques.emplace_back(lo, hi);
            prev_hi = hi;
        }
    }
    return out;
}

KncSliceReport knc_slices(const std::vector<RunRecord>& records, const std::string& metric) {
    std::map<KncBand, std::vector<RunRecord>> by_band;
    for (const auto& r : records) by_band[knc_band(r.bundle_knc)].push_back(r);

    KncSliceReport out;
    std::map<std::string, std::vector<double>> band_means;
    for (const auto& [band, recs] : by_band) {
        KncSlice slice;
        slice.band = band;
        std::set<std::string> bundles;
        for (const auto& r : recs) bundles.insert(r.bundle_id);
        slice.bundle_count = bundles.size();
        slice.rows = aggregate(recs, metric);
        for (const auto& row : slice.rows) band_means[row.detector].push_back(row.mean);
        out.slices.push_back(std::move(slice));
    }
    for (const auto& [det, means] : band_means) {
        const double mx = *std::max_element(means.begin(), means.end());
        const double mn = *std::min_element(means.begin(), means.end());
        out.decline_ratio[det] = mx > 0.0 ? 1.0 - mn / mx : 0.0;
    }
    return out;
}

std::vector<TimingRow> timing_report(const std::vector<RunRecord>& records, std::uint64_t seed) {
    std::set<std::string> bundle_set;
    for (const auto& r : records) bundle_set.insert(r.bundle_id);
    std::vector<std::string> bundles(bundle_set.begin(), bundle_set.end());

    std::set<std::string> selected;
    if (bundles.size() >= 30) {
        std::mt19937_64 rng(seed);
        std::shuffle(bundles.begin(), bundles.end(), rng);
        for (std::size_t i = 0; i < 30; ++i) selected.insert(bundles[i]);  // 3 groups of 10
    } else {
        selected.insert(bundles.begin(), bundles.end());
    }

    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& r : records) {
        if (!selected.contains(r.bundle_id) || !r.metrics) continue;
        acc[r.detector].first += r.wall_time_fit + r.wall_time_score;
        acc[r.detector].second += 1;
    }
    std::vector<TimingRow> out;
    for (const auto& [det, sum] : acc)
        out.push_back({det, sum.first / static_cast<double>(sum.second)});
    std::sort(out.begin(), out.end(),
              [](const TimingRow& a, const TimingRow& b) { return a.mean_seconds < b.mean_seconds; });
    return out;
}

namespace {

/// Regularized lower incomplete gamma P(a, x) (series / continued fraction).
double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Continued fraction for Q(a,x).
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

}  // namespace

double chi2_sf(double x, double dof) {
    if (x <= 0.0) return 1.0;
    return 1.0 - gamma_p(dof / 2.0, x / 2.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace tsad
