// Projection, regression and isolation detectors: PCA, CD, LinearRegression,
// IForest, INNE.

#include <Eigen/Dense>
#include <numeric>
#include <random>

#include "detectors_common.hpp"

namespace tsad::detail {

namespace {

constexpr double kEps = 1e-12;

Eigen::MatrixXd to_eigen(const WindowMatrix& m) {
    Eigen::MatrixXd x(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[j];
    }
    return x;
}

// ---------------------------------------------------------------- PCA

class PcaDetector final : public FittedDetector {
public:
    PcaDetector(DetectorSpec spec, const WindowMatrix& train, double variance_kept)
        : FittedDetector(std::move(spec), train.cols()) {
        Eigen::MatrixXd x = to_eigen(train);
        mean_ = x.colwise().mean();
        x.rowwise() -= mean_.transpose();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
        const Eigen::VectorXd sv = svd.singularValues();
        double total = sv.squaredNorm();
        if (total < kEps) total = 1.0;
        double cum = 0.0;
        Eigen::Index q = 0;
        while (q < sv.size() && cum / total < variance_kept) {
            cum += sv(q) * sv(q);
            ++q;
        }
        q = std::max<Eigen::Index>(q, 1);
        components_ = svd.matrixV().leftCols(q);
    }

    double score_row(std::span<const double> row) const override {
        Eigen::VectorXd v(mean_.size());
        for (Eigen::Index j = 0; j < v.size(); ++j)
            v(j) = row[static_cast<std::size_t>(j)] - mean_(j);
        const Eigen::VectorXd recon = components_ * (components_.transpose() * v);
        return (v - recon).norm();
    }

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd components_;
};

// ---------------------------------------------------------------- CD

class CookDistanceDetector final : public FittedDetector {
public:
    CookDistanceDetector(DetectorSpec spec, const WindowMatrix& train)
        : FittedDetector(std::move(spec), train.cols()) {
        const Eigen::MatrixXd all = to_eigen(train);
        const Eigen::Index n = all.rows();
        const Eigen::Index p = all.cols();  // predictors + intercept
        // Design: all window coordinates but the last, plus an intercept.
        Eigen::MatrixXd x(n, p);
        x.leftCols(p - 1) = all.leftCols(p - 1);
        x.col(p - 1).setOnes();
        const Eigen::VectorXd y = all.col(p - 1);

        Eigen::MatrixXd gram = x.transpose() * x;
        gram += 1e-9 * Eigen::MatrixXd::Identity(p, p);
        gram_solver_.compute(gram);
        beta_ = gram_solver_.solve(x.transpose() * y);
        const Eigen::VectorXd resid = y - x * beta_;
        const double dof = std::max<double>(static_cast<double>(n - p), 1.0);
        s2_ = std::max(resid.squaredNorm() / dof, kEps);
        p_ = static_cast<double>(p);
    }

    double score_row(std::span<const double> row) const override {
        const auto p = static_cast<std::size_t>(beta_.size());
        Eigen::VectorXd x(p);
        for (std::size_t j = 0; j + 1 < p; ++j) x(static_cast<Eigen::Index>(j)) = row[j];
        x(static_cast<Eigen::Index>(p - 1)) = 1.0;
        const double y = row[p - 1];
        const double e = y - x.dot(beta_);
        double h = x.dot(gram_solver_.solve(x));
        h = std::clamp(h, 0.0, 0.999);
        return e * e * h / (p_ * s2_ * (1.0 - h) * (1.0 - h));
    }

private:
    Eigen::LDLT<Eigen::MatrixXd> gram_solver_;
    Eigen::VectorXd beta_;
    double s2_ = 1.0;
    double p_ = 1.0;
};

// ---------------------------------------------------------------- LinearRegression

/// Forecast detector: least-squares prediction of the last time step of each
/// window from the preceding w-1 steps; score is the prediction error norm.
class LinRegDetector final : public FittedDetector {
public:
    LinRegDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t dims)
        : FittedDetector(std::move(spec), train.cols()), dims_(dims) {
        const Eigen::MatrixXd all = to_eigen(train);
        const Eigen::Index cols = all.cols();
        const auto d = static_cast<Eigen::Index>(dims_);
        if (cols < 2 * d) throw std::invalid_argument("LinearRegression: window too short");
        const Eigen::Index pred = cols - d;

        Eigen::MatrixXd x(all.rows(), pred + 1);
        x.leftCols(pred) = all.leftCols(pred);
        x.col(pred).setOnes();
        Eigen::MatrixXd gram = x.transpose() * x;
        gram += 1e-9 * Eigen::MatrixXd::Identity(pred + 1, pred + 1);
        const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
        beta_ = solver.solve(x.transpose() * all.rightCols(d));
    }

    double score_row(std::span<const double> row) const override {
        const Eigen::Index pred = beta_.rows() - 1;
        Eigen::VectorXd x(pred + 1);
        for (Eigen::Index j = 0; j < pred; ++j) x(j) = row[static_cast<std::size_t>(j)];
        x(pred) = 1.0;
        const Eigen::VectorXd yhat = beta_.transpose() * x;
        double err2 = 0.0;
        for (Eigen::Index j = 0; j < yhat.size(); ++j) {
            const double diff = row[static_cast<std::size_t>(pred + j)] - yhat(j);
            err2 += diff * diff;
        }
        return std::sqrt(err2);
    }

private:
    std::size_t dims_;
    Eigen::MatrixXd beta_;  // (pred+1) x d
};

// ---------------------------------------------------------------- IForest

double avg_path_length(double n) {
    if (n <= 1.0) return 0.0;
    if (n == 2.0) return 1.0;
    const double h = std::log(n - 1.0) + 0.5772156649015329;
    return 2.0 * h - 2.0 * (n - 1.0) / n;
}

class IsolationForestDetector final : public FittedDetector {
public:
    IsolationForestDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t trees,
                            std::size_t subsample)
        : FittedDetector(spec, train.cols()) {
        const auto rows = copy_rows(train);
        subsample = std::min(subsample, rows.size());
        c_norm_ = std::max(avg_path_length(static_cast<double>(subsample)), kEps);
        const auto depth_limit = static_cast<std::size_t>(
            std::ceil(std::log2(std::max<double>(static_cast<double>(subsample), 2.0))));

        std::mt19937_64 rng(spec.seed);
        std::vector<std::size_t> idx(rows.size());
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t t = 0; t < trees; ++t) {
            std::shuffle(idx.begin(), idx.end(), rng);
            std::vector<std::size_t> sample(idx.begin(),
                                            idx.begin() + static_cast<std::ptrdiff_t>(subsample));
            Tree tree;
            build(tree, rows, sample, 0, depth_limit, rng);
            trees_.push_back(std::move(tree));
        }
    }

    double score_row(std::span<const double> row) const override {
        double mean_path = 0.0;
        for (const auto& tree : trees_) mean_path += path_length(tree, 0, row, 0);
        mean_path /= static_cast<double>(trees_.size());
        return std::pow(2.0, -mean_path / c_norm_);
    }

private:
    struct Node {
        std::size_t split_dim = 0;
        double split_value = 0.0;
        int left = -1, right = -1;  // -1 marks a leaf
        double size = 0.0;
    };
    struct Tree {
        std::vector<Node> nodes;
    };

    int build(Tree& tree, const std::vector<std::vector<double>>& rows,
              const std::vector<std::size_t>& sample, std::size_t depth, std::size_t depth_limit,
              std::mt19937_64& rng) {
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes[static_cast<std::size_t>(id)].size = static_cast<double>(sample.size());
        if (sample.size() <= 1 || depth >= depth_limit) return id;

        const std::size_t d = rows[0].size();
        // Pick a split dimension with spread; give up after d tries.
        std::uniform_int_distribution<std::size_t> dim_dist(0, d - 1);
        for (std::size_t attempt = 0; attempt < d; ++attempt) {
            const std::size_t dim = dim_dist(rng);
            double lo = rows[sample[0]][dim], hi = lo;
            for (std::size_t i : sample) {
                lo = std::min(lo, rows[i][dim]);
                hi = std::max(hi, rows[i][dim]);
            }
            if (hi <= lo) continue;
            std::uniform_real_distribution<double> val_dist(lo, hi);
            const double split = val_dist(rng);
            std::vector<std::size_t> left, right;
            for (std::size_t i : sample) (rows[i][dim] < split ? left : right).push_back(i);
            if (left.empty() || right.empty()) continue;
            const int l = build(tree, rows, left, depth + 1, depth_limit, rng);
            const int r = build(tree, rows, right, depth + 1, depth_limit, rng);
            tree.nodes[static_cast<std::size_t>(id)].split_dim = dim;
            tree.nodes[static_cast<std::size_t>(id)].split_value = split;
            tree.nodes[static_cast<std::size_t>(id)].left = l;
            tree.nodes[static_cast<std::size_t>(id)].right = r;
            return id;
        }
        return id;  // all sampled values identical: leaf
    }

    double path_length(const Tree& tree, int node, std::span<const double> row,
                       std::size_t depth) const {
        const Node& n = tree.nodes[static_cast<std::size_t>(node)];
        if (n.left < 0)
            return static_cast<double>(depth) + avg_path_length(n.size);
        const int next = row[n.split_dim] < n.split_value ? n.left : n.right;
        return path_length(tree, next, row, depth + 1);
    }

    std::vector<Tree> trees_;
    double c_norm_ = 1.0;
};

// ---------------------------------------------------------------- INNE

class InneDetector final : public FittedDetector {
public:
    InneDetector(DetectorSpec spec, const WindowMatrix& train, std::size_t ensembles,
                 std::size_t subsample)
        : FittedDetector(spec, train.cols()) {
        const auto rows = copy_rows(train);
        subsample = std::min(std::max<std::size_t>(subsample, 2), rows.size());
        std::mt19937_64 rng(spec.seed);
        std::vector<std::size_t> idx(rows.size());
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t e = 0; e < ensembles; ++e) {
            std::shuffle(idx.begin(), idx.end(), rng);
            Ensemble ens;
            for (std::size_t i = 0; i < subsample; ++i) ens.centers.push_back(rows[idx[i]]);
            ens.radius.resize(subsample);
            ens.nn_radius.resize(subsample);
            std::vector<std::size_t> nn(subsample);
            for (std::size_t i = 0; i < subsample; ++i) {
                double best = std::numeric_limits<double>::infinity();
                std::size_t best_j = i;
                for (std::size_t j = 0; j < subsample; ++j) {
                    if (j == i) continue;
                    const double d = euclid(ens.centers[i], ens.centers[j]);
                    if (d < best) {
                        best = d;
                        best_j = j;
                    }
                }
                ens.radius[i] = best;
                nn[i] = best_j;
            }
            for (std::size_t i = 0; i < subsample; ++i) ens.nn_radius[i] = ens.radius[nn[i]];
            ensembles_.push_back(std::move(ens));
        }
    }

    double score_row(std::span<const double> row) const override {
        double acc = 0.0;
        for (const auto& ens : ensembles_) {
            // Smallest hypersphere containing the query; 1 when isolated.
            double best_radius = std::numeric_limits<double>::infinity();
            double iso = 1.0;
            for (std::size_t i = 0; i < ens.centers.size(); ++i) {
                const double d = euclid(row, ens.centers[i]);
                if (d <= ens.radius[i] && ens.radius[i] < best_radius) {
                    best_radius = ens.radius[i];
                    iso = 1.0 - ens.nn_radius[i] / std::max(ens.radius[i], kEps);
                }
            }
            acc += iso;
        }
        return acc / static_cast<double>(ensembles_.size());
    }

private:
    struct Ensemble {
        std::vector<std::vector<double>> centers;
        std::vector<double> radius;
        std::vector<double> nn_radius;
    };
    std::vector<Ensemble> ensembles_;
};

}  // namespace

DetectorPtr fit_pca(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<PcaDetector>(spec, train, spec.param("variance_kept", 0.9));
}

DetectorPtr fit_cd(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<CookDistanceDetector>(spec, train);
}

DetectorPtr fit_linreg(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<LinRegDetector>(spec, train,
                                            train.cols() / train.config().length);
}

DetectorPtr fit_iforest(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<IsolationForestDetector>(spec, train, int_param(spec, "trees", 100),
                                                     int_param(spec, "subsample", 256));
}

DetectorPtr fit_inne(const DetectorSpec& spec, const WindowMatrix& train) {
    return std::make_unique<InneDetector>(spec, train, int_param(spec, "ensembles", 100),
                                          int_param(spec, "subsample", 8));
}

}  // namespace tsad::detail
