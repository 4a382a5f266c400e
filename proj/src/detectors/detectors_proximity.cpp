// Distance- and density-based detectors: KNN, LOF, COF, Sampling, SOS, ABOD,
// SOD, KMeans, CBLOF.

#include <numeric>
#include <random>

#include "detectors_common.hpp"

namespace tsad::detail {

namespace {

constexpr double kEps = 1e-12;

// ---------------------------------------------------------------- KNN

class KnnDetector final : public FittedDetector {
public:
    KnnDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t k)
        : FittedDetector(std::move(spec), train.cols()), rows_(copy_rows(train)), k_(k) {}

    double score_row(std::span<const double> row) const override {
        const auto nn = knn_of(row, rows_, k_, rows_.size());
        double mean = 0.0;
        for (const auto& nb : nn) mean += nb.dist;
        return mean / static_cast<double>(nn.size());
    }

private:
    std::vector<std::vector<double>> rows_;
    std::size_t k_;
};

// ---------------------------------------------------------------- LOF

class LofDetector final : public FittedDetector {
public:
    LofDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t k)
        : FittedDetector(std::move(spec), train.cols()), rows_(copy_rows(train)), k_(k) {
        const std::size_t n = rows_.size();
        kdist_.resize(n);
        lrd_.resize(n);
        std::vector<std::vector<Neighbor>> nbrs(n);
        for (std::size_t i = 0; i < n; ++i) {
            nbrs[i] = knn_of(rows_[i], rows_, k_, i);
            kdist_[i] = nbrs[i].back().dist;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double reach = 0.0;
            for (const auto& nb : nbrs[i]) reach += std::max(kdist_[nb.index], nb.dist);
            lrd_[i] = 1.0 / std::max(reach / static_cast<double>(k_), kEps);
        }
    }

    double score_row(std::span<const double> row) const override {
        const auto nn = knn_of(row, rows_, k_, rows_.size());
        double reach = 0.0, nbr_lrd = 0.0;
        for (const auto& nb : nn) {
            reach += std::max(kdist_[nb.index], nb.dist);
            nbr_lrd += lrd_[nb.index];
        }
        const double lrd_q = 1.0 / std::max(reach / static_cast<double>(nn.size()), kEps);
        return nbr_lrd / static_cast<double>(nn.size()) / lrd_q;
    }

private:
    std::vector<std::vector<double>> rows_;
    std::size_t k_;
    std::vector<double> kdist_;
    std::vector<double> lrd_;
};

// ---------------------------------------------------------------- COF

/// Average chaining distance of `points[0]` through the full point list.
double ac_dist(const std::vector<std::span<const double>>& points) {
    const std::size_t r = points.size();  // chain covers r - 1 edges
    if (r < 2) return 0.0;
    std::vector<bool> in_set(r, false);
    in_set[0] = true;
    double acc = 0.0;
    const double denom = static_cast<double>(r) * (static_cast<double>(r) - 1.0);
    for (std::size_t step = 1; step < r; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_b = 0;
        for (std::size_t a = 0; a < r; ++a) {
            if (!in_set[a]) continue;
            for (std::size_t b = 0; b < r; ++b) {
                if (in_set[b]) continue;
                const double d = euclid(points[a], points[b]);
                if (d < best) {
                    best = d;
                    best_b = b;
                }
            }
        }
        in_set[best_b] = true;
        acc += 2.0 * static_cast<double>(r - step) / denom * best;
    }
    return acc;
}

class CofDetector final : public FittedDetector {
public:
    CofDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t k)
        : FittedDetector(std::move(spec), train.cols()), rows_(copy_rows(train)), k_(k) {
        ac_.resize(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            ac_[i] = ac_of(rows_[i], i);
        }
    }

    double score_row(std::span<const double> row) const override {
        const auto nn = knn_of(row, rows_, k_, rows_.size());
        const double ac_q = ac_of(row, rows_.size());
        double nbr_ac = 0.0;
        for (const auto& nb : nn) nbr_ac += ac_[nb.index];
        return ac_q * static_cast<double>(nn.size()) / std::max(nbr_ac, kEps);
    }

private:
    double ac_of(std::span<const double> row, std::size_t skip) const {
        const auto nn = knn_of(row, rows_, k_, skip);
        std::vector<std::span<const double>> pts;
        pts.push_back(row);
        for (const auto& nb : nn) pts.emplace_back(rows_[nb.index]);
        return ac_dist(pts);
    }

    std::vector<std::vector<double>> rows_;
    std::size_t k_;
    std::vector<double> ac_;
};

// ---------------------------------------------------------------- Sampling

class SamplingDetector final : public FittedDetector {
public:
    SamplingDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t subset)
        : FittedDetector(spec, train.cols()) {
        auto rows = copy_rows(train);
        std::mt19937_64 rng(spec.seed);
        std::vector<std::size_t> idx(rows.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        subset = std::min(subset, rows.size());
        for (std::size_t i = 0; i < subset; ++i) subset_.push_back(rows[idx[i]]);
    }

    double score_row(std::span<const double> row) const override {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : subset_) best = std::min(best, euclid(row, s));
        return best;
    }

private:
    std::vector<std::vector<double>> subset_;
};

// ---------------------------------------------------------------- SOS

class SosDetector final : public FittedDetector {
public:
    SosDetector(DetectorSpec spec, const WindowMatrix& train, double perplexity)
        : FittedDetector(std::move(spec), train.cols()), rows_(copy_rows(train)) {
        const std::size_t n = rows_.size();
        perplexity = std::min(perplexity, static_cast<double>(n - 1));
        variance_.resize(n);
        affinity_sum_.resize(n);
        std::vector<double> d2(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) d2[j] = sq_dist(rows_[i], rows_[j]);
            // Binary search the bandwidth matching the target perplexity.
            double lo = 1e-12, hi = 1e12;
            double var = 1.0;
            for (int it = 0; it < 100; ++it) {
                var = 0.5 * (lo + hi);
                double sum = 0.0, h = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const double a = std::exp(-d2[j] / (2.0 * var));
                    sum += a;
                }
                if (sum < kEps) {
                    lo = var;
                    continue;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) continue;
                    const double p = std::exp(-d2[j] / (2.0 * var)) / sum;
                    if (p > kEps) h -= p * std::log(p);
                }
                if (std::exp(h) > perplexity) {
                    hi = var;
                } else {
                    lo = var;
                }
            }
            variance_[i] = var;
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) sum += std::exp(-d2[j] / (2.0 * var));
            }
            affinity_sum_[i] = sum;
        }
    }

    double score_row(std::span<const double> row) const override {
        // Outlier probability: product over training points of (1 - binding
        // probability towards the query).
        double log_p = 0.0;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const double a = std::exp(-sq_dist(rows_[i], row) / (2.0 * variance_[i]));
            const double b = a / std::max(affinity_sum_[i] + a, kEps);
            log_p += std::log(std::max(1.0 - b, kEps));
        }
        return std::exp(log_p);
    }

private:
    std::vector<std::vector<double>> rows_;
    std::vector<double> variance_;
    std::vector<double> affinity_sum_;
};

// ---------------------------------------------------------------- ABOD

class AbodDetector final : public FittedDetector {
public:
    AbodDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t k)
        : FittedDetector(std::move(spec), train.cols()), rows_(copy_rows(train)), k_(k) {}

    double score_row(std::span<const double> row) const override {
        const auto nn = knn_of(row, rows_, k_, rows_.size());
        std::vector<std::vector<double>> diff;
        for (const auto& nb : nn) {
            std::vector<double> v(row.size());
            for (std::size_t t = 0; t < row.size(); ++t) v[t] = rows_[nb.index][t] - row[t];
            diff.push_back(std::move(v));
        }
        std::vector<double> norm2(diff.size(), 0.0);
        for (std::size_t i = 0; i < diff.size(); ++i) {
            for (double v : diff[i]) norm2[i] += v * v;
        }
        double sum = 0.0, sum2 = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < diff.size(); ++i) {
            const double ni = norm2[i];
            if (ni < kEps) continue;
            for (std::size_t j = i + 1; j < diff.size(); ++j) {
                const double nj = norm2[j];
                if (nj < kEps) continue;
                double dot = 0.0;
                for (std::size_t t = 0; t < diff[i].size(); ++t) dot += diff[i][t] * diff[j][t];
                const double w = dot / (ni * nj);
                sum += w;
                sum2 += w * w;
                ++count;
            }
        }
        if (count == 0) return 0.0;  // query coincides with its neighbors
        const double mean = sum / static_cast<double>(count);
        const double var = sum2 / static_cast<double>(count) - mean * mean;
        return -var;
    }

private:
    std::vector<std::vector<double>> rows_;
    std::size_t k_;
};

// ---------------------------------------------------------------- SOD

class SodDetector final : public FittedDetector {
public:
    SodDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t k, double alpha)
        : FittedDetector(std::move(spec), train.cols()),
          rows_(copy_rows(train)),
          k_(k),
          alpha_(alpha) {}

    double score_row(std::span<const double> row) const override {
        const auto nn = knn_of(row, rows_, k_, rows_.size());
        const std::size_t d = row.size();
        std::vector<double> mean(d, 0.0), var(d, 0.0);
        for (const auto& nb : nn) {
            for (std::size_t t = 0; t < d; ++t) mean[t] += rows_[nb.index][t];
        }
        for (double& v : mean) v /= static_cast<double>(nn.size());
        for (const auto& nb : nn) {
            for (std::size_t t = 0; t < d; ++t) {
                const double diff = rows_[nb.index][t] - mean[t];
                var[t] += diff * diff;
            }
        }
        double total_var = 0.0;
        for (double& v : var) {
            v /= static_cast<double>(nn.size());
            total_var += v;
        }
        const double cutoff = alpha_ * total_var / static_cast<double>(d);
        double dev = 0.0;
        std::size_t selected = 0;
        for (std::size_t t = 0; t < d; ++t) {
            if (var[t] < cutoff) {
                const double diff = row[t] - mean[t];
                dev += diff * diff;
                ++selected;
            }
        }
        if (selected == 0) {
            // All dimensions equally spread; fall back to the least-variance one.
            std::size_t t = static_cast<std::size_t>(
                std::min_element(var.begin(), var.end()) - var.begin());
            const double diff = row[t] - mean[t];
            dev = diff * diff;
            selected = 1;
        }
        return std::sqrt(dev / static_cast<double>(selected));
    }

private:
    std::vector<std::vector<double>> rows_;
    std::size_t k_;
    double alpha_;
};

// ---------------------------------------------------------------- k-means core

struct EuclidKMeans {
    std::vector<std::vector<double>> centroids;
    std::vector<std::size_t> assignments;
    std::vector<std::size_t> sizes;
};

EuclidKMeans euclid_kmeans(const std::vector<std::vector<double>>& rows, std::size_t k,
                           std::uint64_t seed, std::size_t max_iter = 100) {
    const std::size_t n = rows.size();
    k = std::min(k, n);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);

    EuclidKMeans km;
    for (std::size_t c = 0; c < k; ++c) km.centroids.push_back(rows[idx[c]]);
    km.assignments.assign(n, 0);

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = sq_dist(rows[i], km.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            changed = changed || km.assignments[i] != best;
            km.assignments[i] = best;
        }
        if (iter > 0 && !changed) break;

        for (std::size_t c = 0; c < k; ++c) {
            std::vector<double> mean(rows[0].size(), 0.0);
            std::size_t count = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (km.assignments[i] != c) continue;
                for (std::size_t t = 0; t < mean.size(); ++t) mean[t] += rows[i][t];
                ++count;
            }
            if (count == 0) {
                // Re-seed an empty cluster from the farthest point.
                std::size_t far_i = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = sq_dist(rows[i], km.centroids[km.assignments[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                km.centroids[c] = rows[far_i];
                km.assignments[far_i] = c;
                continue;
            }
            for (double& v : mean) v /= static_cast<double>(count);
            km.centroids[c] = std::move(mean);
        }
    }
    km.sizes.assign(k, 0);
    for (std::size_t i = 0; i < n; ++i) ++km.sizes[km.assignments[i]];
    return km;
}

class KMeansDetector final : public FittedDetector {
public:
    KMeansDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t k)
        : FittedDetector(spec, train.cols()) {
        centroids_ = euclid_kmeans(copy_rows(train), k, spec.seed).centroids;
    }

    double score_row(std::span<const double> row) const override {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : centroids_) best = std::min(best, euclid(row, c));
        return best;
    }

private:
    std::vector<std::vector<double>> centroids_;
};

// ---------------------------------------------------------------- CBLOF

class CblofDetector final : public FittedDetector {
public:
    CblofDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t k, double alpha,
                  double beta)
        : FittedDetector(spec, train.cols()) {
        const auto rows = copy_rows(train);
        const auto km = euclid_kmeans(rows, k, spec.seed);
        // Sort clusters by size descending; the "large" prefix covers alpha of
        // the points or ends at a beta size ratio.
        std::vector<std::size_t> order(km.centroids.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return km.sizes[a] > km.sizes[b]; });
        const double n = static_cast<double>(rows.size());
        std::size_t cum = 0;
        std::size_t boundary = order.size();
        for (std::size_t i = 0; i < order.size(); ++i) {
            cum += km.sizes[order[i]];
            const bool covers = static_cast<double>(cum) >= alpha * n;
            const bool ratio = i + 1 < order.size() && km.sizes[order[i + 1]] > 0 &&
                               static_cast<double>(km.sizes[order[i]]) /
                                       static_cast<double>(km.sizes[order[i + 1]]) >= beta;
            if (covers || ratio) {
                boundary = i + 1;
                break;
            }
        }
        if (boundary == 0) boundary = 1;
        for (std::size_t i = 0; i < boundary; ++i) large_centroids_.push_back(km.centroids[order[i]]);
    }

    double score_row(std::span<const double> row) const override {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : large_centroids_) best = std::min(best, euclid(row, c));
        return best;
    }

private:
    std::vector<std::vector<double>> large_centroids_;
};

std::size_t neighbor_count(const DetectorSpec& spec, const WindowMatrix& train) {
    std::size_t k = int_param(spec, "k", 10);
    if (train.rows() < 2) throw std::invalid_argument("detector fit: need >= 2 training rows");
    return std::min(k, train.rows() - 1);
}

}  // namespace

DetectorPtr fit_knn(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<KnnDetector>(spec, train, neighbor_count(spec, train));
}

DetectorPtr fit_lof(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<LofDetector>(spec, train, neighbor_count(spec, train));
}

DetectorPtr fit_cof(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<CofDetector>(spec, train, neighbor_count(spec, train));
}

DetectorPtr fit_sampling(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<SamplingDetector>(spec, train, int_param(spec, "subset", 20));
}

DetectorPtr fit_sos(const DetectorSpec& spec, const WindowMatrix& train) {
    if (train.rows() < 3) throw std::invalid_argument("SOS: need >= 3 training rows");
    return std::make_unique<SosDetector>(spec, train, spec.param("perplexity", 4.5));
}

DetectorPtr fit_abod(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<AbodDetector>(spec, train, neighbor_count(spec, train));
}

DetectorPtr fit_sod(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<SodDetector>(spec, train, neighbor_count(spec, train),
                                         spec.param("alpha", 0.8));
}

DetectorPtr fit_kmeans(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<KMeansDetector>(spec, train, int_param(spec, "clusters", 8));
}

DetectorPtr fit_cblof(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<CblofDetector>(spec, train, int_param(spec, "clusters", 8),
                                           spec.param("alpha", 0.9), spec.param("beta", 5.0));
}

}  // namespace tsad::detail
