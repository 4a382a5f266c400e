#pragma once

#include <cstdint>
#include <vector>

#include "tsad/core.hpp"

namespace tsad {

/// Univariate sequence used by dataset construction and difficulty metrics.
using Sequence = std::vector<double>;

/// Shape-based distance in [0,2]:
///   SBD(x,y) = 1 - max_s CC_s(x,y) / (||x|| ||y||)
/// over all integer shifts with zero padding. Both inputs all-zero gives 0.
/// Uses direct cross-correlation below length 256, FFT above.
double sbd(const Sequence& x, const Sequence& y);

struct SbdClustering {
    std::vector<std::size_t> assignments;  // cluster index per sequence
    std::vector<Sequence> centroids;
    std::vector<double> intra;  // mean member-to-centroid SBD per cluster
    std::vector<std::size_t> sizes;
    std::vector<double> objective_trace;  // total member-to-centroid SBD per iteration
};

/// Lloyd-style k-means under SBD. Centroids are shift-aligned member means.
SbdClustering sbd_kmeans(const std::vector<Sequence>& seqs, std::size_t k, std::uint64_t seed,
                         std::size_t max_iter = 50);

/// Cluster with smallest intra distance; ties broken by larger size, then
/// lower index.
std::size_t most_concentrated_cluster(const SbdClustering& c);

namespace detail {
/// Best alignment shift of y against x (the shift maximizing normalized CC).
long best_shift(const Sequence& x, const Sequence& y);
/// Max normalized cross-correlation over shifts, in [-1,1].
double max_norm_cc(const Sequence& x, const Sequence& y);
}  // namespace detail

}  // namespace tsad
