#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tsad/core.hpp"

namespace tsad {

enum class DetectorId {
    Knn,
    Lof,
    Sampling,
    Sos,
    Kde,
    Gmm,
    KMeans,
    Cblof,
    Cof,
    Hbos,
    IForest,
    Inne,
    Loda,
    Copod,
    Ecod,
    Abod,
    Qmcd,
    Mad,
    Msd,
    Mcd,
    Pca,
    CookDistance,
    Sod,
    LinearRegression,
};

enum class DetectorFamily { Proximity, StatisticalModel, Forecast };

struct DetectorSpec {
    DetectorId id = DetectorId::Knn;
    std::map<std::string, double> params;  // missing keys take documented defaults
    std::uint64_t seed = 0;

    double param(const std::string& key, double fallback) const;
};

/// Immutable fitted model; score is deterministic in (state, row) and larger
/// means more anomalous.
class FittedDetector {
public:
    virtual ~FittedDetector() = default;

    ScoreSeries score(const WindowMatrix& query) const;

    const DetectorSpec& spec() const { return spec_; }
    std::size_t dim() const { return dim_; }

protected:
    FittedDetector(DetectorSpec spec, std::size_t dim) : spec_(std::move(spec)), dim_(dim) {}
    virtual double score_row(std::span<const double> row) const = 0;

private:
    DetectorSpec spec_;
    std::size_t dim_;
};

std::unique_ptr<FittedDetector> fit(const DetectorSpec& spec, const WindowMatrix& train);

/// The classical catalog: one default-parameter template per detector.
std::vector<DetectorSpec> list_catalog();

std::string detector_name(DetectorId id);
DetectorId detector_id_from_name(const std::string& name);
DetectorFamily detector_family(DetectorId id);
std::string family_name(DetectorFamily family);

}  // namespace tsad
