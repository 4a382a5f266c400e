#pragma once

// Internal helpers shared by the detector implementations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsad/detectors.hpp"

namespace tsad::detail {

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double euclid(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(sq_dist(a, b));
}

struct Neighbor {
    double dist = 0.0;
    std::size_t index = 0;
    bool operator<(const Neighbor& o) const {
        return dist < o.dist || (dist == o.dist && index < o.index);
    }
};

/// Brute-force k nearest rows of `rows` to `query`; `skip` excludes one row
/// (use rows.size() for none).
std::vector<Neighbor> knn_of(std::span<const double> query, const std::vector<std::vector<double>>& rows,
                             std::size_t k, std::size_t skip);

/// Copies window rows into owned vectors.
std::vector<std::vector<double>> copy_rows(const WindowMatrix& m);

std::size_t int_param(const DetectorSpec& spec, const std::string& key, std::size_t fallback);

// Per-detector factories (implementation files: proximity / statistical /
// subspace groups).
using DetectorPtr = std::unique_ptr<FittedDetector>;
DetectorPtr fit_knn(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_lof(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_sampling(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_sos(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_kde(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_gmm(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_kmeans(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_cblof(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_cof(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_hbos(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_iforest(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_inne(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_loda(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_copod(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_ecod(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_abod(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_qmcd(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_mad(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_msd(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_mcd(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_pca(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_cd(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_sod(const DetectorSpec&, const WindowMatrix&);
DetectorPtr fit_linreg(const DetectorSpec&, const WindowMatrix&);

}  // namespace tsad::detail
