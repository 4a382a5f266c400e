#include "tsad/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nlohmann/json.hpp"
#include "tsad/io.hpp"

namespace tsad {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* selector_name(WindowSelector s) {
    switch (s) {
        case WindowSelector::Fixed: return "fixed";
        case WindowSelector::Acf: return "acf";
        case WindowSelector::Fft: return "fft";
    }
    throw std::logic_error("unknown selector");
}

WindowSelector selector_from_name(const std::string& s) {
    if (s == "fixed") return WindowSelector::Fixed;
    if (s == "acf") return WindowSelector::Acf;
    if (s == "fft") return WindowSelector::Fft;
    throw std::invalid_argument("unknown window selector: " + s);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

const std::vector<std::string>& record_columns() {
    static const std::vector<std::string> cols = {
        "bundle_id",  "detector",      "window_length",   "window_stride",
        "window_selector", "resolved_window_length", "seed", "bundle_knc",
        "wall_time_fit", "wall_time_score", "error",
        "precision",  "recall",        "f1",              "range_f1",
        "auc_roc",    "auc_pr",        "vus_roc",         "vus_pr"};
    return cols;
}

std::string opt_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::string fixed3(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << v;
    return os.str();
}

std::string fixed6(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    os << v;
    return os.str();
}

ordered_json record_to_json(const RunRecord& r) {
    ordered_json j;
    j["bundle_id"] = r.bundle_id;
    j["detector"] = r.detector;
    j["window_length"] = r.window.length;
    j["window_stride"] = r.window.stride;
    j["window_selector"] = selector_name(r.window.selector);
    j["resolved_window_length"] = r.resolved_window_length;
    j["seed"] = r.seed;
    j["bundle_knc"] = r.bundle_knc;
    j["wall_time_fit"] = r.wall_time_fit;
    j["wall_time_score"] = r.wall_time_score;
    j["error"] = r.error;
    if (r.metrics) {
        ordered_json m;
        m["precision"] = r.metrics->precision;
        m["recall"] = r.metrics->recall;
        m["f1"] = r.metrics->f1;
        m["range_f1"] = r.metrics->range_f1;
        for (const char* name : {"auc_roc", "auc_pr", "vus_roc", "vus_pr"}) {
            const auto v = r.metrics->by_name(name);
            if (v)
                m[name] = *v;
            else
                m[name] = nullptr;
        }
        j["metrics"] = std::move(m);
    } else {
        j["metrics"] = nullptr;
    }
    return j;
}

RunRecord record_from_json(const ordered_json& j) {
    RunRecord r;
    r.bundle_id = j.at("bundle_id").get<std::string>();
    r.detector = j.at("detector").get<std::string>();
    r.window.length = j.at("window_length").get<std::size_t>();
    r.window.stride = j.at("window_stride").get<std::size_t>();
    r.window.selector = selector_from_name(j.at("window_selector").get<std::string>());
    r.resolved_window_length = j.at("resolved_window_length").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.bundle_knc = j.at("bundle_knc").get<double>();
    r.wall_time_fit = j.at("wall_time_fit").get<double>();
    r.wall_time_score = j.at("wall_time_score").get<double>();
    r.error = j.at("error").get<std::string>();
    if (!j.at("metrics").is_null()) {
        const auto& m = j.at("metrics");
        MetricRecord rec;
        rec.precision = m.at("precision").get<double>();
        rec.recall = m.at("recall").get<double>();
        rec.f1 = m.at("f1").get<double>();
        rec.range_f1 = m.at("range_f1").get<double>();
        auto opt = [&](const char* name) -> std::optional<double> {
            if (m.at(name).is_null()) return std::nullopt;
            return m.at(name).get<double>();
        };
        rec.auc_roc = opt("auc_roc");
        rec.auc_pr = opt("auc_pr");
        rec.vus_roc = opt("vus_roc");
        rec.vus_pr = opt("vus_pr");
        r.metrics = rec;
    }
    return r;
}

}  // namespace

std::string records_to_csv(const std::vector<RunRecord>& records) {
    std::string out;
    const auto& cols = record_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ',';
        out += cols[i];
    }
    out += '\n';
    for (const auto& r : records) {
        std::vector<std::string> fields = {
            csv_escape(r.bundle_id),
            csv_escape(r.detector),
            std::to_string(r.window.length),
            std::to_string(r.window.stride),
            selector_name(r.window.selector),
            std::to_string(r.resolved_window_length),
            std::to_string(r.seed),
            format_double(r.bundle_knc),
            format_double(r.wall_time_fit),
            format_double(r.wall_time_score),
            csv_escape(r.error)};
        if (r.metrics) {
            fields.push_back(format_double(r.metrics->precision));
            fields.push_back(format_double(r.metrics->recall));
            fields.push_back(format_double(r.metrics->f1));
            fields.push_back(format_double(r.metrics->range_f1));
            fields.push_back(opt_field(r.metrics->auc_roc));
            fields.push_back(opt_field(r.metrics->auc_pr));
            fields.push_back(opt_field(r.metrics->vus_roc));
            fields.push_back(opt_field(r.metrics->vus_pr));
        } else {
            fields.insert(fields.end(), 8, std::string());
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            out += fields[i];
        }
        out += '\n';
    }
    return out;
}

std::vector<RunRecord> records_from_csv(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("records csv: empty content");
    {
        const auto header = split_csv_line(line);
        if (header != record_columns())
            throw std::invalid_argument("records csv: unexpected header");
    }
    std::vector<RunRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != record_columns().size())
            throw std::invalid_argument("records csv: wrong field count at line " +
                                        std::to_string(line_no));
        try {
            RunRecord r;
            r.bundle_id = f[0];
            r.detector = f[1];
            r.window.length = std::stoull(f[2]);
            r.window.stride = std::stoull(f[3]);
            r.window.selector = selector_from_name(f[4]);
            r.resolved_window_length = std::stoull(f[5]);
            r.seed = std::stoull(f[6]);
            r.bundle_knc = std::stod(f[7]);
            r.wall_time_fit = std::stod(f[8]);
            r.wall_time_score = std::stod(f[9]);
            r.error = f[10];
            if (!f[11].empty()) {
                MetricRecord m;
                m.precision = std::stod(f[11]);
                m.recall = std::stod(f[12]);
                m.f1 = std::stod(f[13]);
                m.range_f1 = std::stod(f[14]);
                if (!f[15].empty()) m.auc_roc = std::stod(f[15]);
                if (!f[16].empty()) m.auc_pr = std::stod(f[16]);
                if (!f[17].empty()) m.vus_roc = std::stod(f[17]);
                if (!f[18].empty()) m.vus_pr = std::stod(f[18]);
                r.metrics = m;
            }
            out.push_back(std::move(r));
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("records csv: malformed value at line " +
                                        std::to_string(line_no));
        }
    }
    return out;
}

std::string records_to_json(const std::vector<RunRecord>& records) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : records) arr.push_back(record_to_json(r));
    return arr.dump(2) + "\n";
}

std::vector<RunRecord> records_from_json(const std::string& content) {
    const auto arr = ordered_json::parse(content);
    if (!arr.is_array()) throw std::invalid_argument("records json: expected an array");
    std::vector<RunRecord> out;
    for (const auto& j : arr) out.push_back(record_from_json(j));
    return out;
}

std::string markdown_report(const std::vector<RunRecord>& records, const std::string& rank_metric,
                            std::uint64_t timing_seed) {
    if (records.empty()) throw std::invalid_argument("markdown_report: no records");
    std::string md = "# Benchmark report\n\n";

    // One mean per (detector, measure).
    md += "## Accuracy\n\n| Detector |";
    for (const auto& name : MetricRecord::names()) md += " " + name + " |";
    md += "\n|---|";
    for (std::size_t i = 0; i < MetricRecord::names().size(); ++i) md += "---|";
    md += "\n";
    std::map<std::string, std::map<std::string, double>> cells;
    for (const auto& name : MetricRecord::names()) {
        for (const auto& row : aggregate(records, name)) cells[row.detector][name] = row.mean;
    }
    for (const auto& [det, by_metric] : cells) {
        md += "| " + det + " |";
        for (const auto& name : MetricRecord::names()) {
            const auto it = by_metric.find(name);
            md += it == by_metric.end() ? " - |" : " " + fixed3(it->second) + " |";
        }
        md += "\n";
    }

    // Rank statistics need at least 2 detectors and 2 fully-covered bundles.
    bool ranks_available = false;
    try {
        const auto table = rank_table(records, rank_metric);
        const auto fr = friedman(table);
        const auto wx = wilcoxon_pairs(records, rank_metric);
        const auto cd = cd_data(table, wx);
        ranks_available = true;

        md += "\n## Ranks (" + rank_metric + ")\n\n";
        md += "Friedman chi-square = " + fixed3(fr.chi2) + ", p = " + fixed6(fr.p_value) +
              " over " + std::to_string(table.bundles.size()) + " bundles.\n\n";
        md += "| Detector | mean rank |\n|---|---|\n";
        for (std::size_t i = 0; i < cd.detectors.size(); ++i)
            md += "| " + cd.detectors[i] + " | " + fixed3(cd.mean_ranks[i]) + " |\n";
        md += "\nCliques (pairwise Holm p >= " + fixed3(cd.alpha) + "):\n";
        if (cd.cliques.empty()) {
            md += "- none\n";
        } else {
            for (const auto& [lo, hi] : cd.cliques) {
                md += "-";
                for (std::size_t i = lo; i <= hi; ++i) md += " " + cd.detectors[i];
                md += "\n";
            }
        }
    } catch (const std::invalid_argument&) {
    }
    if (!ranks_available)
        md += "\n## Ranks (" + rank_metric + ")\n\nNot available: rank statistics need at least "
              "2 detectors and 2 bundles with complete coverage.\n";

    const auto slices = knc_slices(records, rank_metric);
    md += "\n## Difficulty slices (" + rank_metric + ")\n\n";
    for (const auto& slice : slices.slices) {
        md += "### KNC " + knc_band_name(slice.band) + " (" + std::to_string(slice.bundle_count) +
              " bundles)\n\n| Detector | mean | bundles |\n|---|---|---|\n";
        for (const auto& row : slice.rows)
            md += "| " + row.detector + " | " + fixed3(row.mean) + " | " +
                  std::to_string(row.bundle_count) + " |\n";
        md += "\n";
    }
    md += "| Detector | decline ratio |\n|---|---|\n";
    for (const auto& [det, ratio] : slices.decline_ratio)
        md += "| " + det + " | " + fixed3(ratio) + " |\n";

    md += "\n## Timing\n\n| Detector | mean seconds |\n|---|---|\n";
    for (const auto& row : timing_report(records, timing_seed))
        md += "| " + row.detector + " | " + fixed6(row.mean_seconds) + " |\n";
    return md;
}

namespace {

struct BoxStats {
    double lo, q1, med, q3, hi;
};

double quantile(std::vector<double> sorted, double q) {
    const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return {v.front(), quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75), v.back()};
}

std::string svg_header(int width, int height) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" font-family=\"monospace\" font-size=\"12\">\n";
}

std::string line(double x1, double y1, double x2, double y2) {
    return "<line x1=\"" + fixed3(x1) + "\" y1=\"" + fixed3(y1) + "\" x2=\"" + fixed3(x2) +
           "\" y2=\"" + fixed3(y2) + "\" stroke=\"black\"/>\n";
}

std::string text(double x, double y, const std::string& s, const std::string& extra = "") {
    return "<text x=\"" + fixed3(x) + "\" y=\"" + fixed3(y) + "\"" + extra + ">" + s + "</text>\n";
}

}  // namespace

std::string rank_boxplot_svg(const RankTable& table) {
    const std::size_t k = table.detectors.size();
    const double k_max = static_cast<double>(k);
    const int row_h = 28, left = 160, plot_w = 520, top = 30;
    const int height = top + static_cast<int>(k) * row_h + 40;
    auto x_of = [&](double rank) {
        return static_cast<double>(left) + (rank - 1.0) / std::max(1.0, k_max - 1.0) * plot_w;
    };

    // Detectors sorted by mean rank, best at the top.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return table.mean_rank[a] < table.mean_rank[b]; });

    std::string svg = svg_header(left + plot_w + 40, height);
    svg += line(left, top, left, top + static_cast<double>(k) * row_h);
    for (double r = 1.0; r <= k_max; r += std::max(1.0, std::floor(k_max / 8.0))) {
        const double x = x_of(r);
        svg += line(x, top + static_cast<double>(k) * row_h, x, top + static_cast<double>(k) * row_h + 5);
        svg += text(x - 4, top + static_cast<double>(k) * row_h + 20, fixed3(r).substr(0, fixed3(r).find('.')));
    }
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t d = order[i];
        const double cy = top + (static_cast<double>(i) + 0.5) * row_h;
        svg += text(8, cy + 4, table.detectors[d]);
        if (table.ranks[d].empty()) continue;
        const auto bs = box_stats(table.ranks[d]);
        const double bh = row_h * 0.6;
        svg += line(x_of(bs.lo), cy, x_of(bs.q1), cy);
        svg += line(x_of(bs.q3), cy, x_of(bs.hi), cy);
        svg += line(x_of(bs.lo), cy - bh / 4, x_of(bs.lo), cy + bh / 4);
        svg += line(x_of(bs.hi), cy - bh / 4, x_of(bs.hi), cy + bh / 4);
        svg += "<rect x=\"" + fixed3(x_of(bs.q1)) + "\" y=\"" + fixed3(cy - bh / 2) + "\" width=\"" +
               fixed3(std::max(0.5, x_of(bs.q3) - x_of(bs.q1))) + "\" height=\"" + fixed3(bh) +
               "\" fill=\"white\" stroke=\"black\"/>\n";
        svg += line(x_of(bs.med), cy - bh / 2, x_of(bs.med), cy + bh / 2);
    }
    svg += "</svg>\n";
    return svg;
}

std::string cd_diagram_svg(const CdData& cd) {
    const std::size_t k = cd.detectors.size();
    const double k_max = static_cast<double>(k);
    const int left = 40, axis_w = 560, axis_y = 40;
    auto x_of = [&](double rank) {
        return static_cast<double>(left) + (rank - 1.0) / std::max(1.0, k_max - 1.0) * axis_w;
    };
    const int height = axis_y + 30 + static_cast<int>(cd.cliques.size()) * 12 +
                       static_cast<int>((k + 1) / 2) * 20 + 40;

    std::string svg = svg_header(left + axis_w + 200, height);
    svg += line(left, axis_y, left + axis_w, axis_y);
    for (std::size_t r = 1; r <= k; ++r) {
        const double x = x_of(static_cast<double>(r));
        svg += line(x, axis_y - 4, x, axis_y);
        svg += text(x - 4, axis_y - 8, std::to_string(r));
    }
    // Clique bars just below the axis.
    double bar_y = axis_y + 8;
    for (const auto& [lo, hi] : cd.cliques) {
        svg += "<line x1=\"" + fixed3(x_of(cd.mean_ranks[lo]) - 3) + "\" y1=\"" + fixed3(bar_y) +
               "\" x2=\"" + fixed3(x_of(cd.mean_ranks[hi]) + 3) + "\" y2=\"" + fixed3(bar_y) +
               "\" stroke=\"black\" stroke-width=\"4\"/>\n";
        bar_y += 12;
    }
    // Labels: best half hangs on the left edge, worst half on the right.
    double label_y = bar_y + 20;
    for (std::size_t i = 0; i < k; ++i) {
        const bool left_side = i < (k + 1) / 2;
        const double y = label_y + static_cast<double>(left_side ? i : k - 1 - i) * 20;
        const double x = x_of(cd.mean_ranks[i]);
        svg += line(x, axis_y, x, y - 4);
        if (left_side) {
            svg += line(8, y - 4, x, y - 4);
            svg += text(8, y - 8, cd.detectors[i] + " (" + fixed3(cd.mean_ranks[i]) + ")");
        } else {
            svg += line(x, y - 4, left + axis_w + 190, y - 4);
            svg += text(x + 6, y - 8, cd.detectors[i] + " (" + fixed3(cd.mean_ranks[i]) + ")",
                        "");
        }
    }
    svg += "</svg>\n";
    return svg;
}

void write_report_files(const std::vector<RunRecord>& records, const std::filesystem::path& out_dir,
                        const std::string& rank_metric, std::uint64_t timing_seed) {
    std::filesystem::create_directories(out_dir);
    atomic_write(out_dir / "report.md", markdown_report(records, rank_metric, timing_seed));
    try {
        const auto table = rank_table(records, rank_metric);
        const auto wx = wilcoxon_pairs(records, rank_metric);
        atomic_write(out_dir / "rank_boxplot.svg", rank_boxplot_svg(table));
        atomic_write(out_dir / "cd_diagram.svg", cd_diagram_svg(cd_data(table, wx)));
    } catch (const std::invalid_argument&) {
        // Too few detectors or bundles for rank plots; the report says so.
    }
}

}  // namespace tsad
