#include "tsad/difficulty.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace tsad {

namespace {

constexpr double kEps = 1e-15;

/// Mean SBD from x to its k nearest members of `set`.
double knn_mean_dist(const Sequence& x, const std::vector<Sequence>& set, std::size_t k) {
    std::vector<double> dists;
    dists.reserve(set.size());
    for (const auto& s : set) dists.push_back(sbd(x, s));
    k = std::min(k, dists.size());
    std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k), dists.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += dists[i];
    return acc / static_cast<double>(k);
}

double mean_knn_to(const std::vector<Sequence>& from, const std::vector<Sequence>& to,
                   std::size_t k) {
    double acc = 0.0;
    for (const auto& s : from) acc += knn_mean_dist(s, to, k);
    return acc / static_cast<double>(from.size());
}

double mean_pairwise(const std::vector<Sequence>& set) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t j = 0; j < set.size(); ++j) {
            if (i == j) continue;
            acc += sbd(set[i], set[j]);
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

}  // namespace

double knc(const SequenceSets& sets) {
    if (sets.std_set.empty() || sets.nor_set.empty() || sets.ano_set.empty())
        throw std::invalid_argument("knc: empty sequence set");
    if (sets.k == 0 || sets.k > sets.std_set.size())
        throw std::invalid_argument("knc: k out of range");
    const double num = mean_knn_to(sets.ano_set, sets.std_set, sets.k);
    const double den = mean_knn_to(sets.nor_set, sets.std_set, sets.k);
    if (den <= kEps) throw std::invalid_argument("knc: zero denominator (degenerate data)");
    return num / den;
}

double rc(const std::vector<Sequence>& all_seqs) {
    const std::size_t n = all_seqs.size();
    if (n < 3) throw std::invalid_argument("rc: need >= 3 sequences");
    double mean_acc = 0.0, min_acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double mean_d = 0.0;
        double min_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = sbd(all_seqs[i], all_seqs[j]);
            mean_d += d;
            min_d = std::min(min_d, d);
        }
        mean_acc += mean_d / static_cast<double>(n - 1);
        min_acc += min_d;
    }
    if (min_acc <= kEps) throw std::invalid_argument("rc: zero nearest-neighbor distances");
    return mean_acc / min_acc;
}

double nc(const std::vector<Sequence>& nor_set, const std::vector<Sequence>& ano_set) {
    if (nor_set.size() < 2 || ano_set.size() < 2)
        throw std::invalid_argument("nc: each set needs >= 2 members");
    const double den = mean_pairwise(ano_set);
    if (den <= kEps) throw std::invalid_argument("nc: zero anomalous spread");
    return mean_pairwise(nor_set) / den;
}

double na(const std::vector<Sequence>& nor_set, const std::vector<Sequence>& ano_set,
          std::size_t k_nor, std::size_t k_ano, std::uint64_t seed) {
    if (k_nor < 2) throw std::invalid_argument("na: k_nor must be >= 2");
    const auto nor = sbd_kmeans(nor_set, std::min(k_nor, nor_set.size()), seed);
    const auto ano = sbd_kmeans(ano_set, std::min(k_ano, ano_set.size()), seed + 1);

    double min_cross = std::numeric_limits<double>::infinity();
    for (const auto& ca : ano.centroids) {
        for (const auto& cn : nor.centroids) min_cross = std::min(min_cross, sbd(ca, cn));
    }
    const double den = mean_pairwise(nor.centroids);
    if (den <= kEps) throw std::invalid_argument("na: degenerate normal clustering");
    return min_cross / den;
}

KncBand knc_band(double knc_value) {
    if (knc_value < 1.0) return KncBand::Below1;
    if (knc_value < 2.0) return KncBand::From1To2;
    if (knc_value < 5.0) return KncBand::From2To5;
    if (knc_value < 10.0) return KncBand::From5To10;
    return KncBand::Above10;
}

std::string knc_band_name(KncBand band) {
    switch (band) {
        case KncBand::Below1: return "<1";
        case KncBand::From1To2: return "1-2";
        case KncBand::From2To5: return "2-5";
        case KncBand::From5To10: return "5-10";
        case KncBand::Above10: return ">10";
    }
    return "?";
}

}  // namespace tsad
