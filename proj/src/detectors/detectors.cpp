#include "tsad/detectors.hpp"

#include <cctype>
#include <stdexcept>

#include "detectors_common.hpp"

namespace tsad {

double DetectorSpec::param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

ScoreSeries FittedDetector::score(const WindowMatrix& query) const {
    if (query.cols() != dim_)
        throw std::invalid_argument("FittedDetector::score: query dimension mismatch");
    std::vector<double> out(query.rows());
    for (std::size_t i = 0; i < query.rows(); ++i) out[i] = score_row(query.row(i));
    return ScoreSeries(std::move(out));
}

std::unique_ptr<FittedDetector> fit(const DetectorSpec& spec, const WindowMatrix& train) {
    using namespace detail;
    switch (spec.id) {
        case DetectorId::Knn: return fit_knn(spec, train);
        case DetectorId::Lof: return fit_lof(spec, train);
        case DetectorId::Sampling: return fit_sampling(spec, train);
        case DetectorId::Sos: return fit_sos(spec, train);
        case DetectorId::Kde: return fit_kde(spec, train);
        case DetectorId::Gmm: return fit_gmm(spec, train);
        case DetectorId::KMeans: return fit_kmeans(spec, train);
        case DetectorId::Cblof: return fit_cblof(spec, train);
        case DetectorId::Cof: return fit_cof(spec, train);
        case DetectorId::Hbos: return fit_hbos(spec, train);
        case DetectorId::IForest: return fit_iforest(spec, train);
        case DetectorId::Inne: return fit_inne(spec, train);
        case DetectorId::Loda: return fit_loda(spec, train);
        case DetectorId::Copod: return fit_copod(spec, train);
        case DetectorId::Ecod: return fit_ecod(spec, train);
        case DetectorId::Abod: return fit_abod(spec, train);
        case DetectorId::Qmcd: return fit_qmcd(spec, train);
        case DetectorId::Mad: return fit_mad(spec, train);
        case DetectorId::Msd: return fit_msd(spec, train);
        case DetectorId::Mcd: return fit_mcd(spec, train);
        case DetectorId::Pca: return fit_pca(spec, train);
        case DetectorId::CookDistance: return fit_cd(spec, train);
        case DetectorId::Sod: return fit_sod(spec, train);
        case DetectorId::LinearRegression: return fit_linreg(spec, train);
    }
    throw std::invalid_argument("fit: unknown detector id");
}

std::vector<DetectorSpec> list_catalog() {
    std::vector<DetectorSpec> out;
    for (auto id : {DetectorId::Knn, DetectorId::Lof, DetectorId::Sampling, DetectorId::Sos,
                    DetectorId::Kde, DetectorId::Gmm, DetectorId::KMeans, DetectorId::Cblof,
                    DetectorId::Cof, DetectorId::Hbos, DetectorId::IForest, DetectorId::Inne,
                    DetectorId::Loda, DetectorId::Copod, DetectorId::Ecod, DetectorId::Abod,
                    DetectorId::Qmcd, DetectorId::Mad, DetectorId::Msd, DetectorId::Mcd,
                    DetectorId::Pca, DetectorId::CookDistance, DetectorId::Sod,
                    DetectorId::LinearRegression}) {
        DetectorSpec spec;
        spec.id = id;
        out.push_back(spec);
    }
    return out;
}

std::string detector_name(DetectorId id) {
    switch (id) {
        case DetectorId::Knn: return "KNN";
        case DetectorId::Lof: return "LOF";
        case DetectorId::Sampling: return "Sampling";
        case DetectorId::Sos: return "SOS";
        case DetectorId::Kde: return "KDE";
        case DetectorId::Gmm: return "GMM";
        case DetectorId::KMeans: return "KMeans";
        case DetectorId::Cblof: return "CBLOF";
        case DetectorId::Cof: return "COF";
        case DetectorId::Hbos: return "HBOS";
        case DetectorId::IForest: return "IForest";
        case DetectorId::Inne: return "INNE";
        case DetectorId::Loda: return "LODA";
        case DetectorId::Copod: return "COPOD";
        case DetectorId::Ecod: return "ECOD";
        case DetectorId::Abod: return "ABOD";
        case DetectorId::Qmcd: return "QMCD";
        case DetectorId::Mad: return "MAD";
        case DetectorId::Msd: return "MSD";
        case DetectorId::Mcd: return "MCD";
        case DetectorId::Pca: return "PCA";
        case DetectorId::CookDistance: return "CD";
        case DetectorId::Sod: return "SOD";
        case DetectorId::LinearRegression: return "LinearRegression";
    }
    return "?";
}

DetectorId detector_id_from_name(const std::string& name) {
    auto lower = [](std::string s) {
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    for (const auto& spec : list_catalog()) {
        if (lower(detector_name(spec.id)) == lower(name)) return spec.id;
    }
    throw std::invalid_argument("unknown detector name: " + name);
}

DetectorFamily detector_family(DetectorId id) {
    switch (id) {
        case DetectorId::Knn:
        case DetectorId::Lof:
        case DetectorId::Sampling:
        case DetectorId::Sos:
        case DetectorId::KMeans:
        case DetectorId::Cblof:
        case DetectorId::Cof:
        case DetectorId::IForest:
        case DetectorId::Inne:
        case DetectorId::Abod:
        case DetectorId::Qmcd:
        case DetectorId::Pca:
        case DetectorId::CookDistance:
        case DetectorId::Sod:
            return DetectorFamily::Proximity;
        case DetectorId::Kde:
        case DetectorId::Gmm:
        case DetectorId::Hbos:
        case DetectorId::Loda:
        case DetectorId::Copod:
        case DetectorId::Ecod:
        case DetectorId::Mad:
        case DetectorId::Msd:
        case DetectorId::Mcd:
            return DetectorFamily::StatisticalModel;
        case DetectorId::LinearRegression:
            return DetectorFamily::Forecast;
    }
    return DetectorFamily::Proximity;
}

std::string family_name(DetectorFamily family) {
    switch (family) {
        case DetectorFamily::Proximity: return "proximity-based";
        case DetectorFamily::StatisticalModel: return "statistical-model-based";
        case DetectorFamily::Forecast: return "forecast-based";
    }
    return "?";
}

namespace detail {

std::vector<Neighbor> knn_of(std::span<const double> query,
                             const std::vector<std::vector<double>>& rows, std::size_t k,
                             std::size_t skip) {
    std::vector<Neighbor> all;
    all.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == skip) continue;
        all.push_back({euclid(query, rows[i]), i});
    }
    k = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
    all.resize(k);
    return all;
}

std::vector<std::vector<double>> copy_rows(const WindowMatrix& m) {
    std::vector<std::vector<double>> rows(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        rows[i].assign(r.begin(), r.end());
    }
    return rows;
}

std::size_t int_param(const DetectorSpec& spec, const std::string& key, std::size_t fallback) {
    const double v = spec.param(key, static_cast<double>(fallback));
    if (v < 0) throw std::invalid_argument("negative integer parameter: " + key);
    return static_cast<std::size_t>(v + 0.5);
}

}  // namespace detail

}  // namespace tsad
