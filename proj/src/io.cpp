#include "tsad/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tsad {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void atomic_write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& field, std::size_t line_no) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw std::runtime_error("CSV parse error at line " + std::to_string(line_no) + ": '" +
                                 field + "'");
    return v;
}

std::vector<std::string> csv_lines(const std::string& content) {
    std::vector<std::string> lines;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

}  // namespace

std::string series_to_csv(const TimeSeries& series) {
    std::string out;
    for (std::size_t j = 0; j < series.dims(); ++j) {
        if (j > 0) out += ',';
        out += "dim" + std::to_string(j);
    }
    out += '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (std::size_t j = 0; j < series.dims(); ++j) {
            if (j > 0) out += ',';
            out += format_double(series.at(i, j));
        }
        out += '\n';
    }
    return out;
}

TimeSeries series_from_csv(const std::string& content, const std::string& name) {
    const auto lines = csv_lines(content);
    if (lines.size() < 2) throw std::runtime_error("CSV parse error: no data rows");
    const std::size_t d = split(lines[0], ',').size();
    std::vector<double> values;
    values.reserve((lines.size() - 1) * d);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split(lines[i], ',');
        if (fields.size() != d)
            throw std::runtime_error("CSV parse error at line " + std::to_string(i + 1) +
                                     ": expected " + std::to_string(d) + " columns");
        for (const auto& f : fields) values.push_back(parse_double(f, i + 1));
    }
    return TimeSeries(std::move(values), d, name);
}

TimeSeries load_series_csv(const fs::path& path) {
    return series_from_csv(read_file(path), path.stem().string());
}

std::string labels_to_csv(const LabelSeries& labels) {
    std::string out = "label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out += std::to_string(labels[i]) + "\n";
    return out;
}

LabelSeries labels_from_csv(const std::string& content) {
    const auto lines = csv_lines(content);
    std::vector<int> labels;
    for (std::size_t i = 1; i < lines.size(); ++i)
        labels.push_back(static_cast<int>(parse_double(lines[i], i + 1)));
    return LabelSeries(std::move(labels));
}

LabelSeries load_labels_csv(const fs::path& path) { return labels_from_csv(read_file(path)); }

std::string scores_to_csv(const AlignedScores& scores) {
    std::string out = "score\n";
    for (std::size_t i = 0; i < scores.size(); ++i) out += format_double(scores[i]) + "\n";
    return out;
}

std::string meta_to_json(const BundleMeta& meta) {
    ordered_json j;
    j["id"] = meta.id;
    j["source_class"] = meta.source_class;
    j["chosen_cluster"] = meta.chosen_cluster;
    j["instance_length"] = meta.instance_length;
    j["anomaly_instance_ids"] = meta.anomaly_instance_ids;
    j["seed"] = meta.seed;
    j["knc"] = meta.knc;
    j["standard_instances"] = meta.standard_instances;
    j["test_instance_flags"] = meta.test_instance_flags;
    return j.dump(2) + "\n";
}

BundleMeta meta_from_json(const std::string& content) {
    const auto j = ordered_json::parse(content);
    BundleMeta meta;
    meta.id = j.at("id").get<std::string>();
    meta.source_class = j.at("source_class").get<int>();
    meta.chosen_cluster = j.at("chosen_cluster").get<std::size_t>();
    meta.instance_length = j.at("instance_length").get<std::size_t>();
    meta.anomaly_instance_ids = j.at("anomaly_instance_ids").get<std::vector<std::size_t>>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.knc = j.at("knc").get<double>();
    meta.standard_instances = j.at("standard_instances").get<std::size_t>();
    meta.test_instance_flags = j.at("test_instance_flags").get<std::vector<int>>();
    return meta;
}

void save_bundle(const DatasetBundle& bundle, const fs::path& dir) {
    fs::create_directories(dir);
    atomic_write(dir / "standard.csv", series_to_csv(bundle.standard));
    atomic_write(dir / "test.csv", series_to_csv(bundle.test));
    atomic_write(dir / "labels.csv", labels_to_csv(bundle.truth_labels()));
    atomic_write(dir / "meta.json", meta_to_json(bundle.meta));
}

DatasetBundle load_bundle(const fs::path& dir) {
    TimeSeries standard = load_series_csv(dir / "standard.csv");
    TimeSeries test = load_series_csv(dir / "test.csv");
    const LabelSeries labels = load_labels_csv(dir / "labels.csv");
    BundleMeta meta = meta_from_json(read_file(dir / "meta.json"));
    DatasetBundle bundle{std::move(standard), std::move(test), labels_to_ranges(labels),
                         std::move(meta)};
    return bundle;
}

CategoricalDataset load_categorical_csv(const fs::path& path) {
    const auto lines = csv_lines(read_file(path));
    CategoricalDataset out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto fields = split(lines[i], ',');
        if (fields.size() < 2)
            throw std::runtime_error("CSV parse error at line " + std::to_string(i + 1) +
                                     ": need label + values");
        out.labels.push_back(static_cast<int>(parse_double(fields[0], i + 1)));
        Sequence s;
        for (std::size_t j = 1; j < fields.size(); ++j) s.push_back(parse_double(fields[j], i + 1));
        if (!out.instances.empty() && s.size() != out.instances[0].size())
            throw std::runtime_error("CSV parse error at line " + std::to_string(i + 1) +
                                     ": unequal instance length");
        out.instances.push_back(std::move(s));
    }
    return out;
}

}  // namespace tsad
