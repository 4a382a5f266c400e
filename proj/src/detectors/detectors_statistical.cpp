// Distribution-model detectors: KDE, GMM, HBOS, LODA, COPOD, ECOD, MAD, MSD,
// MCD, QMCD.

#include <Eigen/Dense>
#include <numbers>
#include <numeric>
#include <random>

#include "detectors_common.hpp"

namespace tsad::detail {

namespace {

constexpr double kEps = 1e-12;
constexpr double kVarFloor = 1e-6;

double logsumexp(const std::vector<double>& xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j) {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][j];
    return out;
}

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
    double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2 - 1), v.end());
    return 0.5 * (hi + v[n / 2 - 1]);
}

double skewness_of(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    return m2 > kEps ? m3 / std::pow(m2, 1.5) : 0.0;
}

// ---------------------------------------------------------------- KDE

class KdeDetector final : public FittedDetector {
public:
    KdeDetector(DetectorSpec spec, const WindowMatrix& train, double bw_floor)
        : FittedDetector(std::move(spec), train.cols()), rows_(copy_rows(train)) {
        const std::size_t n = rows_.size(), d = train.cols();
        // Scott's rule per dimension, floored.
        const double factor = std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(d) + 4.0));
        bandwidth_.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            const auto col = column(rows_, j);
            double mean = 0.0;
            for (double x : col) mean += x;
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (double x : col) var += (x - mean) * (x - mean);
            var /= static_cast<double>(n);
            bandwidth_[j] = std::max(std::sqrt(var) * factor, bw_floor);
        }
        log_const_ = -std::log(static_cast<double>(n));
        for (std::size_t j = 0; j < d; ++j)
            log_const_ -= std::log(bandwidth_[j] * std::sqrt(2.0 * std::numbers::pi));
    }

    double score_row(std::span<const double> row) const override {
        std::vector<double> log_terms(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            double e = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) {
                const double z = (row[j] - rows_[i][j]) / bandwidth_[j];
                e -= 0.5 * z * z;
            }
            log_terms[i] = e;
        }
        const double log_density = log_const_ + logsumexp(log_terms);
        return -log_density;
    }

private:
    std::vector<std::vector<double>> rows_;
    std::vector<double> bandwidth_;
    double log_const_ = 0.0;
};

// ---------------------------------------------------------------- GMM

class GmmDetector final : public FittedDetector {
public:
    GmmDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t components,
                double cov_floor)
        : FittedDetector(spec, train.cols()) {
        const auto rows = copy_rows(train);
        const std::size_t n = rows.size(), d = train.cols();
        const std::size_t c = std::min(components, n);

        std::mt19937_64 rng(spec.seed);
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        means_.resize(c);
        vars_.assign(c, std::vector<double>(d, 1.0));
        weights_.assign(c, 1.0 / static_cast<double>(c));
        for (std::size_t k = 0; k < c; ++k) means_[k] = rows[idx[k]];

        // Diagonal-covariance EM.
        std::vector<std::vector<double>> resp(n, std::vector<double>(c));
        double prev_ll = -std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 100; ++iter) {
            double ll = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> lp(c);
                for (std::size_t k = 0; k < c; ++k) lp[k] = log_comp(k, rows[i]);
                const double norm = logsumexp(lp);
                ll += norm;
                for (std::size_t k = 0; k < c; ++k) resp[i][k] = std::exp(lp[k] - norm);
            }
            for (std::size_t k = 0; k < c; ++k) {
                double nk = 0.0;
                for (std::size_t i = 0; i < n; ++i) nk += resp[i][k];
                nk = std::max(nk, kEps);
                weights_[k] = nk / static_cast<double>(n);
                for (std::size_t j = 0; j < d; ++j) {
                    double m = 0.0;
                    for (std::size_t i = 0; i < n; ++i) m += resp[i][k] * rows[i][j];
                    m /= nk;
                    double v = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const double diff = rows[i][j] - m;
                        v += resp[i][k] * diff * diff;
                    }
                    means_[k][j] = m;
                    vars_[k][j] = std::max(v / nk, cov_floor);
                }
            }
            if (ll - prev_ll < 1e-8 * std::abs(prev_ll) + 1e-10 && iter > 2) break;
            prev_ll = ll;
        }
    }

    double score_row(std::span<const double> row) const override {
        std::vector<double> lp(means_.size());
        for (std::size_t k = 0; k < means_.size(); ++k) lp[k] = log_comp(k, row);
        return -logsumexp(lp);
    }

private:
    double log_comp(std::size_t k, std::span<const double> x) const {
        double e = std::log(std::max(weights_[k], kEps));
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double v = vars_[k][j];
            const double diff = x[j] - means_[k][j];
            e += -0.5 * (std::log(2.0 * std::numbers::pi * v) + diff * diff / v);
        }
        return e;
    }
    double log_comp(std::size_t k, const std::vector<double>& x) const {
        return log_comp(k, std::span<const double>(x));
    }

    std::vector<std::vector<double>> means_;
    std::vector<std::vector<double>> vars_;
    std::vector<double> weights_;
};

// ---------------------------------------------------------------- HBOS

class HbosDetector final : public FittedDetector {
public:
    HbosDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t bins)
        : FittedDetector(std::move(spec), train.cols()), bins_(bins) {
        const auto rows = copy_rows(train);
        const std::size_t d = train.cols(), n = rows.size();
        lo_.resize(d);
        hi_.resize(d);
        hist_.assign(d, std::vector<double>(bins_, 0.0));
        for (std::size_t j = 0; j < d; ++j) {
            const auto col = column(rows, j);
            lo_[j] = *std::min_element(col.begin(), col.end());
            hi_[j] = *std::max_element(col.begin(), col.end());
            for (double x : col) hist_[j][bin_of(j, x)] += 1.0;
            for (double& h : hist_[j]) h /= static_cast<double>(n);
        }
    }

    double score_row(std::span<const double> row) const override {
        double score = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            double height = 0.0;
            if (row[j] >= lo_[j] && row[j] <= hi_[j]) height = hist_[j][bin_of(j, row[j])];
            score += -std::log(std::max(height, kEps));
        }
        return score;
    }

private:
    std::size_t bin_of(std::size_t j, double x) const {
        if (hi_[j] <= lo_[j]) return 0;  // degenerate dimension: single bin
        const double t = (x - lo_[j]) / (hi_[j] - lo_[j]);
        auto b = static_cast<std::size_t>(t * static_cast<double>(bins_));
        return std::min(b, bins_ - 1);
    }

    std::size_t bins_;
    std::vector<double> lo_, hi_;
    std::vector<std::vector<double>> hist_;
};

// ---------------------------------------------------------------- LODA

class LodaDetector final : public FittedDetector {
public:
    LodaDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t projections,
                 std::size_t bins)
        : FittedDetector(spec, train.cols()), bins_(bins) {
        const auto rows = copy_rows(train);
        const std::size_t d = train.cols(), n = rows.size();
        const auto nonzero = static_cast<std::size_t>(
            std::ceil(std::sqrt(static_cast<double>(d))));
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (std::size_t p = 0; p < projections; ++p) {
            Projection proj;
            proj.weights.assign(d, 0.0);
            std::vector<std::size_t> idx(d);
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            for (std::size_t t = 0; t < std::min(nonzero, d); ++t)
                proj.weights[idx[t]] = gauss(rng);
            std::vector<double> z(n);
            for (std::size_t i = 0; i < n; ++i) z[i] = dot(proj.weights, rows[i]);
            proj.lo = *std::min_element(z.begin(), z.end());
            proj.hi = *std::max_element(z.begin(), z.end());
            proj.hist.assign(bins_, 0.0);
            for (double v : z) proj.hist[bin_of(proj, v)] += 1.0 / static_cast<double>(n);
            projections_.push_back(std::move(proj));
        }
    }

    double score_row(std::span<const double> row) const override {
        double acc = 0.0;
        for (const auto& proj : projections_) {
            const double z = dot(proj.weights, row);
            double prob = 0.0;
            if (z >= proj.lo && z <= proj.hi) prob = proj.hist[bin_of(proj, z)];
            acc += -std::log(std::max(prob, kEps));
        }
        return acc / static_cast<double>(projections_.size());
    }

private:
    struct Projection {
        std::vector<double> weights;
        double lo = 0.0, hi = 0.0;
        std::vector<double> hist;
    };

    static double dot(const std::vector<double>& w, std::span<const double> x) {
        double s = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
        return s;
    }
    std::size_t bin_of(const Projection& p, double z) const {
        if (p.hi <= p.lo) return 0;
        const double t = (z - p.lo) / (p.hi - p.lo);
        auto b = static_cast<std::size_t>(t * static_cast<double>(bins_));
        return std::min(b, bins_ - 1);
    }

    std::size_t bins_;
    std::vector<Projection> projections_;
};

// ---------------------------------------------------------------- COPOD / ECOD

/// Shared empirical-CDF tail machinery. The two detectors differ in the CDF
/// convention: COPOD uses rank/n, ECOD rank/(n+1).
class TailProbDetector : public FittedDetector {
public:
    TailProbDetector(DetectorSpec spec, const WindowMatrix& train, bool ecod_convention)
        : FittedDetector(std::move(spec), train.cols()), ecod_(ecod_convention) {
        const auto rows = copy_rows(train);
        const std::size_t d = train.cols();
        sorted_.resize(d);
        skew_.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            sorted_[j] = column(rows, j);
            skew_[j] = skewness_of(sorted_[j]);
            std::sort(sorted_[j].begin(), sorted_[j].end());
        }
    }

    double score_row(std::span<const double> row) const override {
        double left = 0.0, right = 0.0, skewed = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto& col = sorted_[j];
            const double n = static_cast<double>(col.size());
            const double denom = ecod_ ? n + 1.0 : n;
            const auto le = static_cast<double>(
                std::upper_bound(col.begin(), col.end(), row[j]) - col.begin());
            const auto ge = static_cast<double>(
                col.end() - std::lower_bound(col.begin(), col.end(), row[j]));
            const double u_l = std::clamp(le / denom, 1.0 / denom, 1.0);
            const double u_r = std::clamp(ge / denom, 1.0 / denom, 1.0);
            const double o_l = -std::log(u_l);
            const double o_r = -std::log(u_r);
            left += o_l;
            right += o_r;
            skewed += skew_[j] < 0.0 ? o_l : o_r;
        }
        return std::max({left, right, skewed});
    }

private:
    bool ecod_;
    std::vector<std::vector<double>> sorted_;
    std::vector<double> skew_;
};

// ---------------------------------------------------------------- MAD / MSD

class MadDetector final : public FittedDetector {
public:
    MadDetector(DetectorSpec spec, const WindowMatrix& train)
        : FittedDetector(std::move(spec), train.cols()) {
        const auto rows = copy_rows(train);
        const std::size_t d = train.cols();
        median_.resize(d);
        scale_.resize(d);
        for (std::size_t j = 0; j < d; ++j) {
            auto col = column(rows, j);
            median_[j] = median_of(col);
            for (double& x : col) x = std::abs(x - median_[j]);
            scale_[j] = std::max(1.4826 * median_of(col), kEps);
        }
    }

    double score_row(std::span<const double> row) const override {
        double best = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j)
            best = std::max(best, std::abs(row[j] - median_[j]) / scale_[j]);
        return best;
    }

private:
    std::vector<double> median_, scale_;
};

class MsdDetector final : public FittedDetector {
public:
    MsdDetector(DetectorSpec spec, const WindowMatrix& train)
        : FittedDetector(std::move(spec), train.cols()) {
        const auto rows = copy_rows(train);
        const std::size_t d = train.cols(), n = rows.size();
        mean_.assign(d, 0.0);
        std_.assign(d, 0.0);
        for (const auto& r : rows) {
            for (std::size_t j = 0; j < d; ++j) mean_[j] += r[j];
        }
        for (double& m : mean_) m /= static_cast<double>(n);
        for (const auto& r : rows) {
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = r[j] - mean_[j];
                std_[j] += diff * diff;
            }
        }
        for (double& s : std_) s = std::max(std::sqrt(s / static_cast<double>(n)), kEps);
    }

    double score_row(std::span<const double> row) const override {
        double best = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j)
            best = std::max(best, std::abs(row[j] - mean_[j]) / std_[j]);
        return best;
    }

private:
    std::vector<double> mean_, std_;
};

// ---------------------------------------------------------------- MCD

class McdDetector final : public FittedDetector {
public:
    McdDetector(DetectorSpec spec, const WindowMatrix& train, double support_fraction)
        : FittedDetector(spec, train.cols()) {
        const auto rows = copy_rows(train);
        const std::size_t n = rows.size();
        const auto d = static_cast<Eigen::Index>(train.cols());
        const auto h = static_cast<std::size_t>(
            std::ceil(support_fraction * static_cast<double>(n)));

        Eigen::MatrixXd x(n, d);
        for (std::size_t i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];

        std::mt19937_64 rng(spec.seed);
        double best_logdet = std::numeric_limits<double>::infinity();
        for (int start = 0; start < 5; ++start) {
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(h);
            auto [mean, cov, logdet] = estimate(x, idx);
            // C-steps: refit on the h points with smallest Mahalanobis distance.
            for (int step = 0; step < 30; ++step) {
                const auto d2 = mahalanobis2(x, mean, cov);
                std::vector<std::size_t> order(n);
                std::iota(order.begin(), order.end(), 0);
                std::sort(order.begin(), order.end(),
                          [&](std::size_t a, std::size_t b) { return d2[a] < d2[b]; });
                order.resize(h);
                auto [m2, c2, ld2] = estimate(x, order);
                if (ld2 >= logdet - 1e-12) break;
                mean = m2;
                cov = c2;
                logdet = ld2;
            }
            if (logdet < best_logdet) {
                best_logdet = logdet;
                mean_ = mean;
                solver_.compute(cov);
            }
        }
    }

    double score_row(std::span<const double> row) const override {
        Eigen::VectorXd v(mean_.size());
        for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = row[static_cast<std::size_t>(j)] - mean_(j);
        const double d2 = v.dot(solver_.solve(v));
        return std::sqrt(std::max(d2, 0.0));
    }

private:
    static std::tuple<Eigen::VectorXd, Eigen::MatrixXd, double> estimate(
        const Eigen::MatrixXd& x, const std::vector<std::size_t>& idx) {
        const auto d = x.cols();
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
        for (std::size_t i : idx) mean += x.row(static_cast<Eigen::Index>(i)).transpose();
        mean /= static_cast<double>(idx.size());
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t i : idx) {
            const Eigen::VectorXd c = x.row(static_cast<Eigen::Index>(i)).transpose() - mean;
            cov += c * c.transpose();
        }
        cov /= static_cast<double>(idx.size());
        // Ridge keeps the estimate invertible on degenerate subsets.
        const double ridge = std::max(1e-9, 1e-9 * cov.trace() / static_cast<double>(d));
        cov += ridge * Eigen::MatrixXd::Identity(d, d);
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
        const double logdet = ldlt.vectorD().array().max(kEps).log().sum();
        return {mean, cov, logdet};
    }

    static std::vector<double> mahalanobis2(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean,
                                            const Eigen::MatrixXd& cov) {
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
        std::vector<double> out(static_cast<std::size_t>(x.rows()));
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const Eigen::VectorXd c = x.row(i).transpose() - mean;
            out[static_cast<std::size_t>(i)] = c.dot(ldlt.solve(c));
        }
        return out;
    }

    Eigen::VectorXd mean_;
    Eigen::LDLT<Eigen::MatrixXd> solver_;
};

// ---------------------------------------------------------------- QMCD

class QmcdDetector final : public FittedDetector {
public:
    QmcdDetector(DetectorSpec spec, const WindowMatrix& train)
        : FittedDetector(std::move(spec), train.cols()), rows_(copy_rows(train)) {
        const std::size_t d = train.cols();
        lo_.assign(d, std::numeric_limits<double>::infinity());
        hi_.assign(d, -std::numeric_limits<double>::infinity());
        for (const auto& r : rows_) {
            for (std::size_t j = 0; j < d; ++j) {
                lo_[j] = std::min(lo_[j], r[j]);
                hi_[j] = std::max(hi_[j], r[j]);
            }
        }
        for (auto& r : rows_) to_unit(r);
    }

    double score_row(std::span<const double> row) const override {
        // Wrap-around discrepancy kernel against the training sample; dense
        // regions give large products, so negate the log-mean.
        std::vector<double> q(row.begin(), row.end());
        to_unit(q);
        std::vector<double> log_terms(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            double e = 0.0;
            for (std::size_t j = 0; j < q.size(); ++j) {
                const double a = std::abs(q[j] - rows_[i][j]);
                e += std::log(1.5 - a * (1.0 - a));
            }
            log_terms[i] = e;
        }
        return -(logsumexp(log_terms) - std::log(static_cast<double>(rows_.size())));
    }

private:
    void to_unit(std::vector<double>& r) const {
        for (std::size_t j = 0; j < r.size(); ++j) {
            const double range = hi_[j] - lo_[j];
            r[j] = range > 0.0 ? std::clamp((r[j] - lo_[j]) / range, 0.0, 1.0) : 0.0;
        }
    }

    std::vector<std::vector<double>> rows_;
    std::vector<double> lo_, hi_;
};

}  // namespace

DetectorPtr fit_kde(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<KdeDetector>(spec, train, spec.param("bandwidth_floor", kVarFloor));
}

DetectorPtr fit_gmm(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<GmmDetector>(spec, train, int_param(spec, "components", 4),
                                         spec.param("cov_floor", kVarFloor));
}

DetectorPtr fit_hbos(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<HbosDetector>(spec, train, int_param(spec, "bins", 10));
}

DetectorPtr fit_loda(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<LodaDetector>(spec, train, int_param(spec, "projections", 100),
                                          int_param(spec, "bins", 10));
}

DetectorPtr fit_copod(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<TailProbDetector>(spec, train, false);
}

DetectorPtr fit_ecod(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<TailProbDetector>(spec, train, true);
}

DetectorPtr fit_mad(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<MadDetector>(spec, train);
}

DetectorPtr fit_msd(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<MsdDetector>(spec, train);
}

DetectorPtr fit_mcd(const DetectorSpec& spec, const WindowMatrix& train) {
    if (train.rows() < 2) throw std::invalid_argument("MCD: need >= 2 training rows");
    return std::make_unique<McdDetector>(spec, train, spec.param("support_fraction", 0.75));
}

DetectorPtr fit_qmcd(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<QmcdDetector>(spec, train);
}

}  // namespace tsad::detail
