#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rofp/fingerprint.hpp"
#include "rofp/ulsif.hpp"

namespace rofp::detector {

/// uLSIF model-selection settings used per column pair. Explicit
/// `bandwidths` win over `bandwidth_scales`; with neither given, the
/// default median-heuristic grid of the ulsif module applies.
struct UlsifSettings {
    std::vector<double> bandwidths;        // absolute grid, MHz
    std::vector<double> bandwidth_scales;  // multiples of the pooled median distance
    std::vector<double> lambdas;           // empty means the default ladder

    std::vector<double> bandwidth_grid(const ulsif::Samples& inlier,
                                       const ulsif::Samples& test) const;
    std::vector<double> lambda_grid() const;
};

/// One adjacent-column comparison on one LUT path, scored in both
/// directions since neither column is a known inlier.
struct ComparisonResult {
    int path = 0;
    int col_left = 0;
    int col_right = 0;
    ulsif::UlsifModel forward_model;   // inlier = left, test = right
    ulsif::UlsifModel backward_model;  // inlier = right, test = left
    ulsif::AnomalyScores forward;      // scores of both columns under forward_model
    ulsif::AnomalyScores backward;
    double max_score = 0.0;            // max over both directions' scores
};

/// Device-level aggregation: per-path maxima and their global maximum.
struct DeviceScore {
    std::string device_id;
    std::vector<double> path_max;  // one per LUT path
    double statistic = 0.0;        // max over paths
    std::vector<ComparisonResult> comparisons;
};

struct Verdict {
    std::string device_id;
    double statistic = 0.0;
    double threshold = 0.0;
    bool recycled = false;  // statistic strictly above threshold
};

/// Scores one (path, column pair): fits a model per direction, scores all
/// samples of both columns under each, and records the maximum.
ComparisonResult score_pair(const fingerprint::FrequencyFingerprint& fp, int path,
                            std::pair<int, int> pair, const UlsifSettings& settings = {});

/// Recomputes path maxima and the device statistic from raw comparisons;
/// independent of the order the comparisons are listed in.
DeviceScore aggregate_device(std::string device_id, int path_count,
                             std::vector<ComparisonResult> comparisons);

/// Runs score_pair over every path and every adjacent pair (paths never
/// mix) and aggregates. (path, pair) tasks run in parallel on `threads`
/// workers; the result is identical for any thread count.
DeviceScore score_device(const fingerprint::FrequencyFingerprint& fp,
                         const UlsifSettings& settings = {}, unsigned threads = 0);

/// Labels each device recycled iff statistic > threshold.
std::vector<Verdict> classify(const std::vector<DeviceScore>& scores, double threshold);

} // namespace rofp::detector
