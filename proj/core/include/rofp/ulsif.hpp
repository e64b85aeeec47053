#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "rofp/errors.hpp"

namespace rofp::ulsif {

/// Scalar sample vector (RO frequencies in MHz).
using Samples = std::vector<double>;

/// RBF kernel model: bandwidth w plus centers drawn from the test vector.
struct KernelSpec {
    double bandwidth = 1.0;
    std::vector<double> centers;
};

/// Empirical second-moment matrix H_hat (b x b) and first-moment vector
/// h_hat (b) of the kernel features: H over inlier samples, h over test
/// samples. H_hat is symmetric PSD; every h_hat entry lies in [0, 1].
struct GramStats {
    Eigen::MatrixXd h_matrix;
    Eigen::VectorXd h_vector;
};

/// Fitted density-ratio model r_hat(x) = sum_l alpha_l K(x, c_l).
struct UlsifModel {
    KernelSpec kernel;
    double lambda = 0.0;
    Eigen::VectorXd alpha;     // nonnegative after the clamp
    double loocv_score = 0.0;  // criterion value of the winning (w, lambda)
};

/// Which input vector a scored sample came from.
enum class SampleOrigin { inlier, test };

/// Anomaly scores -log(max(r_hat, kEpsilon)), one per scored sample.
struct AnomalyScores {
    std::vector<double> scores;
    std::vector<SampleOrigin> origins;
};

/// Floor applied to r_hat before the log; caps scores at -log(kEpsilon).
inline constexpr double kEpsilon = 1e-12;

/// Largest possible anomaly score, reached when r_hat hits the floor.
double max_score();

/// exp(-(x - center)^2 / (2 w^2)); in (0, 1], symmetric, 1 iff x == center.
/// Throws ValidationError for non-positive or non-finite w or non-finite x/center.
double rbf_kernel(double x, double center, double w);

/// Kernel centers: all test samples when n <= max_centers, otherwise an
/// evenly strided deterministic subsample (index l maps to l*n/max_centers).
std::vector<double> select_centers(const Samples& test, std::size_t max_centers = 100);

/// Median of all pairwise absolute differences of the pooled samples.
/// Median of an even count is the mean of the two middle order statistics.
double median_pairwise_distance(const Samples& pooled);

/// Default bandwidth grid: median pairwise distance of inlier+test pooled,
/// scaled by {1/8, 1/4, 1/2, 1, 2, 4}. Falls back to {1.0} when the median
/// distance is zero (all samples identical).
std::vector<double> default_bandwidth_grid(const Samples& inlier, const Samples& test);

/// Default ridge grid {1e-3, 1e-2, 1e-1, 1, 10}.
std::vector<double> default_lambda_grid();

/// H_hat[l][l'] = mean_i K(f_i, c_l) K(f_i, c_l'), h_hat[l] = mean_j K(f'_j, c_l),
/// with f the inlier vector and f' the test vector.
GramStats compute_gram_stats(const Samples& inlier, const Samples& test, const KernelSpec& kernel);

/// Solves (H_hat + lambda I) alpha = h_hat and clamps negative entries to 0.
/// The pre-clamp solution satisfies the system to 1e-8 relative residual.
Eigen::VectorXd solve_alpha(const GramStats& stats, double lambda);

/// The pre-clamp ridge solution; solve_alpha is its nonnegative clamp.
Eigen::VectorXd solve_alpha_raw(const GramStats& stats, double lambda);

/// Leave-one-out cross-validation estimate of the squared-error objective
/// for one (w, lambda) candidate: the i-th inlier and i-th test sample are
/// held out together, the model is refitted (centers stay fixed), and
/// J = mean_i [ r_hat(f_i)^2 / 2 - r_hat(f'_i) ] over the held-out points.
/// Computed in closed form via rank-one downdates; matches an explicit
/// refit loop to floating-point accuracy.
double loocv_objective(const Samples& inlier, const Samples& test,
                       const KernelSpec& kernel, double lambda);

/// Fits models over the (w, lambda) grid, picks the LOOCV minimizer (ties
/// broken by smaller w, then smaller lambda), and refits it on all data.
UlsifModel select_model(const Samples& inlier, const Samples& test,
                        const std::vector<double>& bandwidth_grid,
                        const std::vector<double>& lambda_grid);

/// select_model with the default grids.
UlsifModel select_model(const Samples& inlier, const Samples& test);

/// r_hat at a point (always >= 0 since alpha >= 0 and K > 0).
double evaluate_ratio(const UlsifModel& model, double x);

/// Anomaly scores for one sample vector, tagged with its origin.
AnomalyScores anomaly_scores(const UlsifModel& model, const Samples& samples,
                             SampleOrigin origin = SampleOrigin::test);

/// Appends rhs scores to lhs (used to score both f and f' under one model).
void append_scores(AnomalyScores& lhs, const AnomalyScores& rhs);

} // namespace rofp::ulsif
