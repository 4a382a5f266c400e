#include "tsad/shapedist.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace tsad {

namespace {

constexpr std::size_t kFftCutoff = 256;

double l2_norm(const Sequence& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& v : a) v /= static_cast<double>(n);
    }
}

/// Full cross-correlation; cc[s + m - 1] = sum_t x[t + s] * y[t], s in [-(m-1), m-1].
std::vector<double> cross_correlate(const Sequence& x, const Sequence& y) {
    const std::size_t m = x.size();
    std::vector<double> cc(2 * m - 1, 0.0);
    if (m < kFftCutoff) {
        for (long s = -(static_cast<long>(m) - 1); s <= static_cast<long>(m) - 1; ++s) {
            double acc = 0.0;
            for (long t = 0; t < static_cast<long>(m); ++t) {
                const long i = t + s;
                if (i >= 0 && i < static_cast<long>(m)) acc += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(t)];
            }
            cc[static_cast<std::size_t>(s + static_cast<long>(m) - 1)] = acc;
        }
        return cc;
    }
    std::size_t size = 1;
    while (size < 2 * m - 1) size <<= 1;
    std::vector<std::complex<double>> fx(size), fy(size);
    for (std::size_t i = 0; i < m; ++i) {
        fx[i] = x[i];
        fy[i] = y[i];
    }
    fft(fx, false);
    fft(fy, false);
    for (std::size_t i = 0; i < size; ++i) fx[i] *= std::conj(fy[i]);
    fft(fx, true);
    // Correlation lag s >= 0 lands at index s; negative lags wrap to the tail.
    for (long s = -(static_cast<long>(m) - 1); s <= static_cast<long>(m) - 1; ++s) {
        const std::size_t idx = s >= 0 ? static_cast<std::size_t>(s)
                                       : size - static_cast<std::size_t>(-s);
        cc[static_cast<std::size_t>(s + static_cast<long>(m) - 1)] = fx[idx].real();
    }
    return cc;
}

}  // namespace

namespace detail {

double max_norm_cc(const Sequence& x, const Sequence& y) {
    const double denom = l2_norm(x) * l2_norm(y);
    if (denom <= 0.0) return 0.0;
    const auto cc = cross_correlate(x, y);
    double best = -std::numeric_limits<double>::infinity();
    for (double v : cc) best = std::max(best, v / denom);
    return best;
}

long best_shift(const Sequence& x, const Sequence& y) {
    const std::size_t m = x.size();
    const auto cc = cross_correlate(x, y);
    std::size_t best_idx = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cc.size(); ++i) {
        if (cc[i] > best) {
            best = cc[i];
            best_idx = i;
        }
    }
    return static_cast<long>(best_idx) - (static_cast<long>(m) - 1);
}

}  // namespace detail

double sbd(const Sequence& x, const Sequence& y) {
    if (x.size() != y.size() || x.empty()) throw std::invalid_argument("sbd: length mismatch");
    const double nx = l2_norm(x), ny = l2_norm(y);
    if (nx <= 0.0 && ny <= 0.0) return 0.0;  // identical degenerate shapes
    if (nx <= 0.0 || ny <= 0.0) return 1.0;
    return 1.0 - detail::max_norm_cc(x, y);
}

namespace {

/// Shift y so that it best aligns to x; out-of-window samples drop, vacated
/// positions zero-fill.
Sequence align_to(const Sequence& x, const Sequence& y) {
    const long m = static_cast<long>(x.size());
    const long s = detail::best_shift(x, y);
    Sequence out(x.size(), 0.0);
    for (long t = 0; t < m; ++t) {
        const long i = t + s;
        if (i >= 0 && i < m) out[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(t)];
    }
    return out;
}

}  // namespace

SbdClustering sbd_kmeans(const std::vector<Sequence>& seqs, std::size_t k, std::uint64_t seed,
                         std::size_t max_iter) {
    const std::size_t n = seqs.size();
    if (k == 0 || k > n) throw std::invalid_argument("sbd_kmeans: bad cluster count");
    const std::size_t m = seqs[0].size();
    for (const auto& s : seqs) {
        if (s.size() != m) throw std::invalid_argument("sbd_kmeans: unequal lengths");
    }

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<Sequence> centroids(k);
    for (std::size_t c = 0; c < k; ++c) centroids[c] = seqs[order[c]];

    std::vector<std::size_t> assign(n, 0);
    std::vector<double> trace;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best_c = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = sbd(centroids[c], seqs[i]);
                if (d < best_d) {
                    best_d = d;
                    best_c = c;
                }
            }
            changed = changed || assign[i] != best_c;
            assign[i] = best_c;
            objective += best_d;
        }
        trace.push_back(objective);
        if (iter > 0 && !changed) break;

        for (std::size_t c = 0; c < k; ++c) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < n; ++i) {
                if (assign[i] == c) members.push_back(i);
            }
            if (members.empty()) {
                // Re-seed from the point farthest from its centroid.
                std::size_t far_i = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = sbd(centroids[assign[i]], seqs[i]);
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                centroids[c] = seqs[far_i];
                assign[far_i] = c;
                continue;
            }
            Sequence mean(m, 0.0);
            for (std::size_t i : members) {
                const Sequence aligned = align_to(centroids[c], seqs[i]);
                for (std::size_t t = 0; t < m; ++t) mean[t] += aligned[t];
            }
            for (double& v : mean) v /= static_cast<double>(members.size());
            // Keep the old centroid when the aligned mean does not improve the
            // cluster cost, so the objective cannot increase.
            double old_cost = 0.0, new_cost = 0.0;
            for (std::size_t i : members) {
                old_cost += sbd(centroids[c], seqs[i]);
                new_cost += sbd(mean, seqs[i]);
            }
            if (new_cost < old_cost) centroids[c] = std::move(mean);
        }
    }

    SbdClustering out;
    out.assignments = std::move(assign);
    out.centroids = std::move(centroids);
    out.intra.assign(k, 0.0);
    out.sizes.assign(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        out.intra[out.assignments[i]] += sbd(out.centroids[out.assignments[i]], seqs[i]);
        ++out.sizes[out.assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (out.sizes[c] > 0) out.intra[c] /= static_cast<double>(out.sizes[c]);
    }
    out.objective_trace = std::move(trace);
    return out;
}

std::size_t most_concentrated_cluster(const SbdClustering& c) {
    if (c.centroids.empty()) throw std::invalid_argument("most_concentrated_cluster: empty clustering");
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.centroids.size(); ++i) {
        if (c.sizes[i] == 0) continue;
        if (c.sizes[best] == 0 || c.intra[i] < c.intra[best] ||
            (c.intra[i] == c.intra[best] && c.sizes[i] > c.sizes[best])) {
            best = i;
        }
    }
    return best;
}

}  // namespace tsad
