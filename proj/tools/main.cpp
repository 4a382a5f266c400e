#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsad/bench.hpp"
#include "tsad/datagen.hpp"
#include "tsad/difficulty.hpp"
#include "tsad/io.hpp"
#include "tsad/metrics.hpp"
#include "tsad/pipeline.hpp"
#include "tsad/report.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace tsad;

namespace {

// Exit-code protocol: 0 clean, 1 usage/config error, 2 data error,
// 3 anomaly detected (detect command only).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatagenConfig {
    std::size_t n_classes = 4;
    std::size_t per_class = 60;
    std::size_t m = 128;
    double noise_sigma = 0.05;
    int source_class = 0;
    std::size_t k_clusters = 3;
    std::size_t anomaly_count = 0;  // 0 = 10% of test instances, rounded up
    double band_lo = 0.25;
    double band_hi = 0.75;
};

struct AppConfig {
    std::uint64_t seed = 0;
    double split_fraction = 0.7;
    std::vector<WindowConfig> windows{{64, 1, WindowSelector::Fixed}};
    std::vector<DetectorSpec> detectors = list_catalog();
    MetricParams metrics;
    std::size_t knc_k = 5;
    DatagenConfig datagen;
    double quality_floor = 0.8;
};

const char* kConfigHelp =
    "Config file keys (JSON) and defaults:\n"
    "  seed: 0                     master RNG seed\n"
    "  split_fraction: 0.7         contiguous train share of the standard series\n"
    "  windows: [{length: 64, stride: 1, selector: \"fixed\"}]\n"
    "                              selector one of fixed|acf|fft\n"
    "  detectors: [{name: ..., params: {...}}]   default: full catalog of 24\n"
    "  range_f1: {alpha_recall: 0.5, alpha_precision: 0, bias: \"flat\",\n"
    "             reciprocal_cardinality: true}  bias one of flat|front|back|middle\n"
    "  vus_buffer: 16              max boundary-relaxation width L\n"
    "  knc_k: 5                    neighbor count for the KNC difficulty metric\n"
    "  quality_floor: 0.8          bundle keep/drop AUC-ROC floor\n"
    "  datagen: {n_classes: 4, per_class: 60, m: 128, noise_sigma: 0.05,\n"
    "            source_class: 0, k_clusters: 3, anomaly_count: 0,\n"
    "            band_lo: 0.25, band_hi: 0.75}\n"
    "                              anomaly_count 0 = 10% of test instances\n"
    "Unknown keys are rejected.";

void reject_unknown(const ordered_json& j, const std::vector<std::string>& allowed,
                    const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw UsageError("config: unknown key '" + key + "' in " + where);
    }
}

WindowSelector selector_from_string(const std::string& s) {
    if (s == "fixed") return WindowSelector::Fixed;
    if (s == "acf") return WindowSelector::Acf;
    if (s == "fft") return WindowSelector::Fft;
    throw UsageError("config: unknown window selector '" + s + "'");
}

RangeBias bias_from_string(const std::string& s) {
    if (s == "flat") return RangeBias::Flat;
    if (s == "front") return RangeBias::Front;
    if (s == "back") return RangeBias::Back;
    if (s == "middle") return RangeBias::Middle;
    throw UsageError("config: unknown range_f1 bias '" + s + "'");
}

AppConfig parse_config(const ordered_json& j) {
    AppConfig cfg;
    reject_unknown(j,
                   {"seed", "split_fraction", "windows", "detectors", "range_f1", "vus_buffer",
                    "knc_k", "quality_floor", "datagen"},
                   "config root");
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("split_fraction")) cfg.split_fraction = j["split_fraction"].get<double>();
    if (j.contains("windows")) {
        cfg.windows.clear();
        for (const auto& w : j["windows"]) {
            reject_unknown(w, {"length", "stride", "selector"}, "windows[]");
            WindowConfig wc;
            if (w.contains("length")) wc.length = w["length"].get<std::size_t>();
            if (w.contains("stride")) wc.stride = w["stride"].get<std::size_t>();
            if (w.contains("selector"))
                wc.selector = selector_from_string(w["selector"].get<std::string>());
            cfg.windows.push_back(wc);
        }
        if (cfg.windows.empty()) throw UsageError("config: windows must not be empty");
    }
    if (j.contains("detectors")) {
        cfg.detectors.clear();
        for (const auto& d : j["detectors"]) {
            reject_unknown(d, {"name", "params"}, "detectors[]");
            DetectorSpec spec;
            try {
                spec.id = detector_id_from_name(d.at("name").get<std::string>());
            } catch (const std::exception& e) {
                throw UsageError(std::string("config: ") + e.what());
            }
            if (d.contains("params")) {
                for (const auto& [key, value] : d["params"].items())
                    spec.params[key] = value.get<double>();
            }
            cfg.detectors.push_back(std::move(spec));
        }
        if (cfg.detectors.empty()) throw UsageError("config: detectors must not be empty");
    }
    if (j.contains("range_f1")) {
        const auto& r = j["range_f1"];
        reject_unknown(r, {"alpha_recall", "alpha_precision", "bias", "reciprocal_cardinality"},
                       "range_f1");
        auto& p = cfg.metrics.range_f1;
        if (r.contains("alpha_recall")) p.alpha_recall = r["alpha_recall"].get<double>();
        if (r.contains("alpha_precision")) p.alpha_precision = r["alpha_precision"].get<double>();
        if (r.contains("bias")) p.bias = bias_from_string(r["bias"].get<std::string>());
        if (r.contains("reciprocal_cardinality"))
            p.reciprocal_cardinality = r["reciprocal_cardinality"].get<bool>();
    }
    if (j.contains("vus_buffer")) cfg.metrics.vus_buffer = j["vus_buffer"].get<std::size_t>();
    if (j.contains("knc_k")) cfg.knc_k = j["knc_k"].get<std::size_t>();
    if (j.contains("quality_floor")) cfg.quality_floor = j["quality_floor"].get<double>();
    if (j.contains("datagen")) {
        const auto& d = j["datagen"];
        reject_unknown(d,
                       {"n_classes", "per_class", "m", "noise_sigma", "source_class", "k_clusters",
                        "anomaly_count", "band_lo", "band_hi"},
                       "datagen");
        auto& g = cfg.datagen;
        if (d.contains("n_classes")) g.n_classes = d["n_classes"].get<std::size_t>();
        if (d.contains("per_class")) g.per_class = d["per_class"].get<std::size_t>();
        if (d.contains("m")) g.m = d["m"].get<std::size_t>();
        if (d.contains("noise_sigma")) g.noise_sigma = d["noise_sigma"].get<double>();
        if (d.contains("source_class")) g.source_class = d["source_class"].get<int>();
        if (d.contains("k_clusters")) g.k_clusters = d["k_clusters"].get<std::size_t>();
        if (d.contains("anomaly_count")) g.anomaly_count = d["anomaly_count"].get<std::size_t>();
        if (d.contains("band_lo")) g.band_lo = d["band_lo"].get<double>();
        if (d.contains("band_hi")) g.band_hi = d["band_hi"].get<double>();
    }
    return cfg;
}

AppConfig load_config(const std::string& path, std::uint64_t seed_override, bool seed_set) {
    AppConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw UsageError("config: cannot open " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        ordered_json j;
        try {
            j = ordered_json::parse(buf.str());
        } catch (const std::exception& e) {
            throw UsageError("config: parse failure in " + path + ": " + e.what());
        }
        try {
            cfg = parse_config(j);
        } catch (const ordered_json::exception& e) {
            throw UsageError("config: " + std::string(e.what()));
        }
    }
    if (seed_set) cfg.seed = seed_override;
    return cfg;
}

void apply_window_flag(AppConfig& cfg, const std::string& window_flag) {
    if (window_flag.empty()) return;
    WindowConfig wc;
    if (window_flag == "acf" || window_flag == "fft") {
        wc.selector = selector_from_string(window_flag);
    } else {
        try {
            wc.length = std::stoull(window_flag);
        } catch (const std::exception&) {
            throw UsageError("--window expects a positive integer, 'acf' or 'fft'");
        }
        if (wc.length == 0) throw UsageError("--window expects a positive integer, 'acf' or 'fft'");
    }
    cfg.windows = {wc};
}

void apply_detector_flag(AppConfig& cfg, const std::string& detector_flag) {
    if (detector_flag.empty()) return;
    DetectorSpec spec;
    try {
        spec.id = detector_id_from_name(detector_flag);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    cfg.detectors = {spec};
}

std::uint64_t content_hash(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------

int cmd_build_dataset(const AppConfig& cfg, const std::string& out_dir) {
    const auto& g = cfg.datagen;
    const CategoricalDataset data = generate_synthetic_categorical(g.n_classes, g.per_class, g.m,
                                                                   g.noise_sigma, cfg.seed);
    BundleParams params;
    params.k_clusters = g.k_clusters;
    params.anomaly_count = g.anomaly_count;
    params.band_lo = g.band_lo;
    params.band_hi = g.band_hi;
    params.knc_k = cfg.knc_k;
    params.seed = cfg.seed;
    const DatasetBundle bundle = build_bundle(data, g.source_class, params);
    save_bundle(bundle, out_dir);
    std::cout << "bundle " << bundle.meta.id << " knc " << format_double(bundle.meta.knc) << "\n";
    return 0;
}

int cmd_detect(const AppConfig& cfg, const std::string& standard_path,
               const std::string& test_path, const std::string& out_dir) {
    const TimeSeries standard = load_series_csv(standard_path);
    const TimeSeries test_series = load_series_csv(test_path);

    PipelineConfig pcfg;
    pcfg.window = cfg.windows.front();
    pcfg.detector = cfg.detectors.front();
    pcfg.detector.seed = cfg.seed;
    pcfg.split_fraction = cfg.split_fraction;
    pcfg.seed = cfg.seed;

    const TrainedPipeline pipeline = train(standard, pcfg);
    const TestResult result = pipeline.test(test_series);

    fs::create_directories(out_dir);
    atomic_write(fs::path(out_dir) / "scores.csv", scores_to_csv(result.scores));
    std::string health = "health\n";
    for (double h : result.health.values()) health += format_double(h) + "\n";
    atomic_write(fs::path(out_dir) / "health.csv", health);
    atomic_write(fs::path(out_dir) / "labels.csv", labels_to_csv(result.labels));

    const bool any = std::any_of(result.labels.values().begin(), result.labels.values().end(),
                                 [](int v) { return v == 1; });
    std::cout << (any ? "anomaly detected" : "no anomaly") << "\n";
    return any ? 3 : 0;
}

std::vector<fs::path> bundle_dirs(const std::string& bundles_arg) {
    std::vector<fs::path> dirs;
    const fs::path root(bundles_arg);
    if (!fs::exists(root)) throw DataError("bundle path does not exist: " + bundles_arg);
    if (fs::exists(root / "meta.json")) {
        dirs.push_back(root);
    } else {
        for (const auto& entry : fs::directory_iterator(root)) {
            if (entry.is_directory() && fs::exists(entry.path() / "meta.json"))
                dirs.push_back(entry.path());
        }
        std::sort(dirs.begin(), dirs.end());
    }
    if (dirs.empty()) throw DataError("no bundles found under " + bundles_arg);
    return dirs;
}

std::vector<RunRecord> run_matrix_parallel(const std::vector<DatasetBundle>& bundles,
                                           const BenchOptions& options, unsigned jobs) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(bundles.size())));
    if (jobs == 1) return run_matrix(bundles, options);
    // Contiguous bundle chunks keep the concatenated record order identical
    // to the serial run.
    std::vector<std::vector<DatasetBundle>> chunks(jobs);
    for (std::size_t i = 0; i < bundles.size(); ++i)
        chunks[i * jobs / bundles.size()].push_back(bundles[i]);
    std::vector<std::vector<RunRecord>> results(jobs);
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t) {
        threads.emplace_back([&, t] {
            if (!chunks[t].empty()) results[t] = run_matrix(chunks[t], options);
        });
    }
    for (auto& th : threads) th.join();
    std::vector<RunRecord> out;
    for (auto& part : results) out.insert(out.end(), part.begin(), part.end());
    return out;
}

ordered_json quality_annotations(const std::vector<RunRecord>& records, double floor) {
    // Bundle keep/drop from the best per-detector mean AUC-ROC.
    std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> acc;
    for (const auto& r : records) {
        if (!r.metrics || !r.metrics->auc_roc) continue;
        auto& cell = acc[r.bundle_id][r.detector];
        cell.first += *r.metrics->auc_roc;
        cell.second += 1;
    }
    ordered_json out = ordered_json::array();
    for (const auto& [bundle, dets] : acc) {
        std::map<std::string, double> auc_by_detector;
        for (const auto& [det, sum] : dets)
            auc_by_detector[det] = sum.first / static_cast<double>(sum.second);
        double best = 0.0;
        for (const auto& [det, auc] : auc_by_detector) best = std::max(best, auc);
        ordered_json j;
        j["bundle_id"] = bundle;
        j["best_auc_roc"] = best;
        j["keep"] = quality_filter_keep(auc_by_detector, floor);
        out.push_back(std::move(j));
    }
    return out;
}

int cmd_bench(const AppConfig& cfg, const std::string& bundles_arg, const std::string& out_dir,
              unsigned jobs, const std::string& config_text) {
    const auto dirs = bundle_dirs(bundles_arg);

    std::uint64_t key = 14695981039346656037ULL;
    key = content_hash(key, config_text);
    key = content_hash(key, std::to_string(cfg.seed));
    std::vector<DatasetBundle> bundles;
    for (const auto& dir : dirs) {
        for (const char* file : {"standard.csv", "test.csv", "labels.csv", "meta.json"})
            key = content_hash(key, read_file(dir / file));
        bundles.push_back(load_bundle(dir));
    }

    fs::create_directories(out_dir);
    const fs::path key_path = fs::path(out_dir) / "cache.key";
    const fs::path csv_path = fs::path(out_dir) / "results.csv";
    const std::string key_text = std::to_string(key) + "\n";

    std::vector<RunRecord> records;
    if (fs::exists(key_path) && fs::exists(csv_path) && read_file(key_path) == key_text) {
        std::cout << "cache hit, reusing " << csv_path.string() << "\n";
        records = records_from_csv(read_file(csv_path));
    } else {
        BenchOptions options;
        options.detectors = cfg.detectors;
        options.windows = cfg.windows;
        options.split_fraction = cfg.split_fraction;
        options.metric_params = cfg.metrics;
        options.seed = cfg.seed;
        records = run_matrix_parallel(bundles, options, jobs);
        atomic_write(csv_path, records_to_csv(records));
        atomic_write(fs::path(out_dir) / "results.json", records_to_json(records));
        atomic_write(key_path, key_text);
    }

    atomic_write(fs::path(out_dir) / "quality.json",
                 quality_annotations(records, cfg.quality_floor).dump(2) + "\n");
    write_report_files(records, out_dir, "auc_roc", cfg.seed);
    std::cout << "wrote " << records.size() << " records to " << out_dir << "\n";
    return 0;
}

int cmd_evaluate(const AppConfig& cfg, const std::string& scores_path,
                 const std::string& pred_path, const std::string& truth_path,
                 const std::string& out_path) {
    const TimeSeries raw_scores = load_series_csv(scores_path);
    if (raw_scores.dims() != 1) throw DataError("scores file must have one column");
    const AlignedScores scores(raw_scores.raw());
    const LabelSeries pred = load_labels_csv(pred_path);
    const LabelSeries truth = load_labels_csv(truth_path);
    const MetricRecord rec = evaluate_all(scores, pred, truth, cfg.metrics);

    ordered_json j;
    for (const auto& name : MetricRecord::names()) {
        const auto v = rec.by_name(name);
        if (v)
            j[name] = *v;
        else
            j[name] = nullptr;
    }
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) atomic_write(out_path, text);
    return 0;
}

int cmd_difficulty(const AppConfig& cfg, const std::string& bundle_dir) {
    const DatasetBundle bundle = load_bundle(bundle_dir);
    SequenceSets sets;
    sets.std_set = bundle.standard_segments();
    sets.nor_set = bundle.normal_test_segments();
    sets.ano_set = bundle.anomaly_test_segments();
    sets.k = std::min(cfg.knc_k, sets.std_set.size());

    std::vector<Sequence> all_seqs = sets.std_set;
    all_seqs.insert(all_seqs.end(), sets.nor_set.begin(), sets.nor_set.end());
    all_seqs.insert(all_seqs.end(), sets.ano_set.begin(), sets.ano_set.end());

    ordered_json j;
    j["knc"] = sets.ano_set.empty() ? ordered_json(nullptr) : ordered_json(knc(sets));
    j["rc"] = rc(all_seqs);
    if (sets.nor_set.size() < 2 || sets.ano_set.size() < 2) {
        j["nc"] = nullptr;
        j["na"] = nullptr;
    } else {
        j["nc"] = nc(sets.nor_set, sets.ano_set);
        const std::size_t k_nor = std::min<std::size_t>(3, sets.nor_set.size());
        const std::size_t k_ano = std::min<std::size_t>(3, sets.ano_set.size());
        j["na"] = na(sets.nor_set, sets.ano_set, k_nor, k_ano, cfg.seed);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_report(const AppConfig& cfg, const std::string& results_path, const std::string& out_dir) {
    const std::string content = read_file(results_path);
    std::vector<RunRecord> records;
    try {
        if (results_path.ends_with(".json"))
            records = records_from_json(content);
        else
            records = records_from_csv(content);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
    write_report_files(records, out_dir, "auc_roc", cfg.seed);
    std::cout << "report written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-series anomaly state detection toolkit"};
    app.footer(kConfigHelp);
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string window_flag, detector_flag, out_dir;
    unsigned jobs = 1;
    app.add_option("--config", config_path, "JSON config file (see footer for keys)");
    app.add_option("--seed", seed, "Master seed (default 0, overrides config)")
        ->each([&](const std::string&) { seed_set = true; });
    app.add_option("--window", window_flag,
                   "Window length, or 'acf'/'fft' for data-driven selection");
    app.add_option("--detector", detector_flag, "Single detector name (default knn)");
    app.add_option("--out", out_dir, "Output directory or file");
    app.add_option("--jobs", jobs, "Parallel bench cells (default 1)");

    auto* build = app.add_subcommand("build-dataset", "Generate a synthetic dataset bundle");
    auto* detect = app.add_subcommand("detect", "Train on a standard series and score a test series");
    std::string standard_path, test_path;
    detect->add_option("standard", standard_path, "Standard (training) series CSV")->required();
    detect->add_option("test", test_path, "Test series CSV")->required();
    auto* bench = app.add_subcommand("bench", "Run the detector x bundle benchmark matrix");
    std::string bundles_arg;
    bench->add_option("bundles", bundles_arg, "Bundle directory, or directory of bundles")
        ->required();
    auto* evaluate = app.add_subcommand("evaluate", "Compute the eight measures from files");
    std::string scores_path, pred_path, truth_path;
    evaluate->add_option("--scores", scores_path, "Aligned scores CSV")->required();
    evaluate->add_option("--pred", pred_path, "Predicted labels CSV")->required();
    evaluate->add_option("--truth", truth_path, "Truth labels CSV")->required();
    auto* difficulty = app.add_subcommand("difficulty", "KNC/RC/NC/NA of a bundle");
    std::string bundle_dir;
    difficulty->add_option("bundle", bundle_dir, "Bundle directory")->required();
    auto* report = app.add_subcommand("report", "Render persisted results to Markdown/SVG");
    std::string results_path;
    report->add_option("results", results_path, "results.csv or results.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        AppConfig cfg = load_config(config_path, seed, seed_set);
        apply_window_flag(cfg, window_flag);
        apply_detector_flag(cfg, detector_flag);
        if (detect->parsed() && detector_flag.empty() && config_path.empty())
            cfg.detectors = {DetectorSpec{}};

        std::string config_text;
        if (!config_path.empty()) config_text = read_file(config_path);

        if (build->parsed()) {
            if (out_dir.empty()) throw UsageError("build-dataset requires --out");
            return cmd_build_dataset(cfg, out_dir);
        }
        if (detect->parsed()) {
            if (out_dir.empty()) throw UsageError("detect requires --out");
            return cmd_detect(cfg, standard_path, test_path, out_dir);
        }
        if (bench->parsed()) {
            if (out_dir.empty()) throw UsageError("bench requires --out");
            return cmd_bench(cfg, bundles_arg, out_dir, jobs, config_text);
        }
        if (evaluate->parsed()) return cmd_evaluate(cfg, scores_path, pred_path, truth_path, out_dir);
        if (difficulty->parsed()) return cmd_difficulty(cfg, bundle_dir);
        if (report->parsed()) {
            if (out_dir.empty()) throw UsageError("report requires --out");
            return cmd_report(cfg, results_path, out_dir);
        }
        throw UsageError("no subcommand");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    }
}
