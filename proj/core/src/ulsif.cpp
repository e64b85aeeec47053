#include "rofp/ulsif.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rofp::ulsif {

namespace {

void require_finite(const Samples& v, const char* name) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw ValidationError(std::string(name) + " contains a non-finite sample");
        }
    }
}

void require_positive_grid(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw ValidationError(std::string(name) + " grid is empty");
    for (double g : grid) {
        if (!(g > 0.0) || !std::isfinite(g)) {
            throw ValidationError(std::string(name) + " grid entry must be positive and finite");
        }
    }
}

Eigen::MatrixXd squared_distances(const Samples& points, const std::vector<double>& centers) {
    Eigen::MatrixXd d2(points.size(), centers.size());
    for (std::size_t j = 0; j < centers.size(); ++j) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double d = points[i] - centers[j];
            d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d * d;
        }
    }
    return d2;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& d2, double w) {
    return (-d2 / (2.0 * w * w)).array().exp();
}

} // namespace

double max_score() { return -std::log(kEpsilon); }

double rbf_kernel(double x, double center, double w) {
    if (!(w > 0.0) || !std::isfinite(w)) {
        throw ValidationError("rbf_kernel: bandwidth must be positive and finite");
    }
    if (!std::isfinite(x) || !std::isfinite(center)) {
        throw ValidationError("rbf_kernel: non-finite input");
    }
    const double d = x - center;
    return std::exp(-(d * d) / (2.0 * w * w));
}

std::vector<double> select_centers(const Samples& test, std::size_t max_centers) {
    if (test.empty()) throw ValidationError("select_centers: test vector is empty");
    if (max_centers == 0) throw ValidationError("select_centers: max_centers must be >= 1");
    const std::size_t n = test.size();
    if (n <= max_centers) return test;
    std::vector<double> centers(max_centers);
    for (std::size_t l = 0; l < max_centers; ++l) {
        centers[l] = test[l * n / max_centers];
    }
    return centers;
}

double median_pairwise_distance(const Samples& pooled) {
    const std::size_t n = pooled.size();
    if (n < 2) throw ValidationError("median_pairwise_distance: need at least two samples");
    std::vector<double> dist;
    dist.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dist.push_back(std::abs(pooled[i] - pooled[j]));
        }
    }
    const std::size_t m = dist.size();
    auto mid = dist.begin() + static_cast<std::ptrdiff_t>(m / 2);
    std::nth_element(dist.begin(), mid, dist.end());
    if (m % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(dist.begin(), mid);
    return 0.5 * (lo + hi);
}

std::vector<double> default_bandwidth_grid(const Samples& inlier, const Samples& test) {
    Samples pooled = inlier;
    pooled.insert(pooled.end(), test.begin(), test.end());
    const double med = median_pairwise_distance(pooled);
    if (med == 0.0) return {1.0};  // all samples identical
    return {med / 8.0, med / 4.0, med / 2.0, med, med * 2.0, med * 4.0};
}

std::vector<double> default_lambda_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 10.0}; }

GramStats compute_gram_stats(const Samples& inlier, const Samples& test, const KernelSpec& kernel) {
    if (inlier.empty() || test.empty()) {
        throw ValidationError("compute_gram_stats: empty sample vector");
    }
    if (kernel.centers.empty()) throw ValidationError("compute_gram_stats: no kernel centers");
    if (!(kernel.bandwidth > 0.0) || !std::isfinite(kernel.bandwidth)) {
        throw ValidationError("compute_gram_stats: bandwidth must be positive and finite");
    }
    require_finite(inlier, "inlier");
    require_finite(test, "test");

    const Eigen::MatrixXd k_in = kernel_matrix(squared_distances(inlier, kernel.centers), kernel.bandwidth);
    const Eigen::MatrixXd k_te = kernel_matrix(squared_distances(test, kernel.centers), kernel.bandwidth);

    GramStats stats;
    stats.h_matrix.noalias() = (k_in.transpose() * k_in) / static_cast<double>(inlier.size());
    stats.h_vector = k_te.colwise().mean();
    return stats;
}

Eigen::VectorXd solve_alpha_raw(const GramStats& stats, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("solve_alpha: lambda must be positive and finite");
    }
    const Eigen::Index b = stats.h_matrix.rows();
    if (b == 0 || stats.h_matrix.cols() != b || stats.h_vector.size() != b) {
        throw ValidationError("solve_alpha: inconsistent GramStats dimensions");
    }
    Eigen::MatrixXd system = stats.h_matrix;
    system.diagonal().array() += lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success) {
        throw Error("solve_alpha: ridge factorization failed");
    }
    Eigen::VectorXd raw = ldlt.solve(stats.h_vector);
    const double h_norm = stats.h_vector.norm();
    const double residual = (system * raw - stats.h_vector).norm();
    if (residual > 1e-8 * std::max(h_norm, 1e-300)) {
        throw Error("solve_alpha: ridge solve residual exceeds 1e-8");
    }
    return raw;
}

Eigen::VectorXd solve_alpha(const GramStats& stats, double lambda) {
    return solve_alpha_raw(stats, lambda).cwiseMax(0.0);
}

namespace {

// Model-selection sweep with the closed-form LOOCV. Distance matrices are
// built once, kernel matrices once per bandwidth (H eigendecomposition plus
// both kernel matrices rotated into its eigenbasis), and the lambda loop
// runs on preallocated buffers: holding out pair i reduces to rank-one
// updates of the full-data solution.
class SelectionSweep {
public:
    SelectionSweep(const Samples& inlier, const Samples& test, const std::vector<double>& centers)
        : d2_in_(squared_distances(inlier, centers)),
          d2_te_(squared_distances(test, centers)),
          n_in_(static_cast<Eigen::Index>(inlier.size())),
          n_te_(static_cast<Eigen::Index>(test.size())),
          held_(std::min(n_in_, n_te_)),
          b_(static_cast<Eigen::Index>(centers.size())) {}

    void set_bandwidth(double w) {
        k_in_ = kernel_matrix(d2_in_, w);
        k_te_ = kernel_matrix(d2_te_, w);
        h_full_.setZero(b_, b_);
        h_full_.selfadjointView<Eigen::Lower>().rankUpdate(k_in_.transpose(),
                                                           1.0 / static_cast<double>(n_in_));
        h_full_.triangularView<Eigen::StrictlyUpper>() = h_full_.transpose();
        h_vec_ = k_te_.colwise().mean();
        eig_.compute(h_full_);
        if (eig_.info() != Eigen::Success) throw Error("loocv: eigendecomposition failed");
        evals_ = eig_.eigenvalues().cwiseMax(0.0);  // H is PSD; clip roundoff
        rot_in_.noalias() = k_in_ * eig_.eigenvectors();
        rot_te_.noalias() = k_te_ * eig_.eigenvectors();
        h_rot_.noalias() = eig_.eigenvectors().transpose() * h_vec_;
        rot_sq_ = rot_in_.topRows(held_).cwiseProduct(rot_in_.topRows(held_));
        rot_cross_ = rot_in_.topRows(held_).cwiseProduct(rot_te_.topRows(held_));
    }

    double objective(double lambda) {
        const double n_in = static_cast<double>(n_in_);
        const double n_te = static_cast<double>(n_te_);
        const double lambda_held = lambda * (n_in - 1.0) / n_in;
        inv_ = 1.0 / (evals_.array() + lambda_held);

        beta_rot_ = h_rot_.array() * inv_;
        model_at_in_.noalias() = rot_in_.topRows(held_) * beta_rot_.matrix();  // k_i' B^-1 h
        self_quad_.noalias() = rot_sq_ * inv_.matrix();                        // k_i' B^-1 k_i
        cross_quad_.noalias() = rot_cross_ * inv_.matrix();                    // k_i' B^-1 q_i
        t_ = (n_te * model_at_in_.array() - cross_quad_.array()) /
             (n_in - self_quad_.array());

        // Held-out coefficients, one row per i, still in the eigenbasis.
        const double scale = (n_in - 1.0) / (n_in * (n_te - 1.0));
        alpha_rot_ = rot_in_.topRows(held_).array().colwise() * t_;
        alpha_rot_ -= rot_te_.topRows(held_).array();
        alpha_rot_.rowwise() *= inv_.transpose();
        alpha_rot_.rowwise() += (n_te * beta_rot_.transpose());
        alpha_rot_ *= scale;

        alpha_held_.noalias() = alpha_rot_.matrix() * eig_.eigenvectors().transpose();
        alpha_held_ = alpha_held_.cwiseMax(0.0);  // Eq.-(10)-style clamp per refit

        r_at_in_ = (k_in_.topRows(held_).cwiseProduct(alpha_held_)).rowwise().sum();
        r_at_te_ = (k_te_.topRows(held_).cwiseProduct(alpha_held_)).rowwise().sum();
        return (0.5 * r_at_in_.array().square() - r_at_te_.array()).mean();
    }

private:
    Eigen::MatrixXd d2_in_, d2_te_;
    Eigen::Index n_in_, n_te_, held_, b_;

    Eigen::MatrixXd k_in_, k_te_, h_full_;
    Eigen::VectorXd h_vec_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_;
    Eigen::VectorXd evals_;
    Eigen::MatrixXd rot_in_, rot_te_, rot_sq_, rot_cross_;
    Eigen::VectorXd h_rot_;

    Eigen::ArrayXd inv_, beta_rot_, t_;
    Eigen::VectorXd model_at_in_, self_quad_, cross_quad_;
    Eigen::ArrayXXd alpha_rot_;
    Eigen::MatrixXd alpha_held_;
    Eigen::VectorXd r_at_in_, r_at_te_;
};

} // namespace

double loocv_objective(const Samples& inlier, const Samples& test,
                       const KernelSpec& kernel, double lambda) {
    if (inlier.size() < 2 || test.size() < 2) {
        throw ValidationError("loocv_objective: need at least two samples per vector");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("loocv_objective: lambda must be positive and finite");
    }
    SelectionSweep sweep(inlier, test, kernel.centers);
    sweep.set_bandwidth(kernel.bandwidth);
    return sweep.objective(lambda);
}

UlsifModel select_model(const Samples& inlier, const Samples& test,
                        const std::vector<double>& bandwidth_grid,
                        const std::vector<double>& lambda_grid) {
    if (inlier.size() < 2 || test.size() < 2) {
        throw ValidationError("select_model: need at least two samples per vector");
    }
    require_finite(inlier, "inlier");
    require_finite(test, "test");
    require_positive_grid(bandwidth_grid, "bandwidth");
    require_positive_grid(lambda_grid, "lambda");

    std::vector<double> bandwidths = bandwidth_grid;
    std::vector<double> lambdas = lambda_grid;
    std::sort(bandwidths.begin(), bandwidths.end());
    std::sort(lambdas.begin(), lambdas.end());

    const std::vector<double> centers = select_centers(test);

    double best_score = std::numeric_limits<double>::infinity();
    double best_w = bandwidths.front();
    double best_lambda = lambdas.front();
    bool have_best = false;

    SelectionSweep sweep(inlier, test, centers);
    for (double w : bandwidths) {
        sweep.set_bandwidth(w);
        for (double lambda : lambdas) {
            const double score = sweep.objective(lambda);
            // Strict comparison over ascending grids implements the
            // smallest-w-then-smallest-lambda tie break.
            if (!have_best || score < best_score) {
                have_best = true;
                best_score = score;
                best_w = w;
                best_lambda = lambda;
            }
        }
    }

    UlsifModel model;
    model.kernel = KernelSpec{best_w, centers};
    model.lambda = best_lambda;
    model.alpha = solve_alpha(compute_gram_stats(inlier, test, model.kernel), best_lambda);
    model.loocv_score = best_score;
    return model;
}

UlsifModel select_model(const Samples& inlier, const Samples& test) {
    return select_model(inlier, test, default_bandwidth_grid(inlier, test), default_lambda_grid());
}

double evaluate_ratio(const UlsifModel& model, double x) {
    const double w = model.kernel.bandwidth;
    double r = 0.0;
    for (Eigen::Index l = 0; l < model.alpha.size(); ++l) {
        const double d = x - model.kernel.centers[static_cast<std::size_t>(l)];
        r += model.alpha[l] * std::exp(-(d * d) / (2.0 * w * w));
    }
    return r;
}

AnomalyScores anomaly_scores(const UlsifModel& model, const Samples& samples, SampleOrigin origin) {
    require_finite(samples, "samples");
    if (model.alpha.size() != static_cast<Eigen::Index>(model.kernel.centers.size())) {
        throw ValidationError("anomaly_scores: model not fitted");
    }
    AnomalyScores out;
    out.scores.reserve(samples.size());
    out.origins.assign(samples.size(), origin);
    for (double x : samples) {
        const double r = evaluate_ratio(model, x);
        out.scores.push_back(-std::log(std::max(r, kEpsilon)));
    }
    return out;
}

void append_scores(AnomalyScores& lhs, const AnomalyScores& rhs) {
    lhs.scores.insert(lhs.scores.end(), rhs.scores.begin(), rhs.scores.end());
    lhs.origins.insert(lhs.origins.end(), rhs.origins.begin(), rhs.origins.end());
}

} // namespace rofp::ulsif
