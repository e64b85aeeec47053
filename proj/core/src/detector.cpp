#include "rofp/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rofp/parallel.hpp"

namespace rofp::detector {

std::vector<double> UlsifSettings::bandwidth_grid(const ulsif::Samples& inlier,
                                                  const ulsif::Samples& test) const {
    if (!bandwidths.empty()) return bandwidths;
    if (bandwidth_scales.empty()) return ulsif::default_bandwidth_grid(inlier, test);
    ulsif::Samples pooled = inlier;
    pooled.insert(pooled.end(), test.begin(), test.end());
    const double med = ulsif::median_pairwise_distance(pooled);
    if (med == 0.0) return {1.0};
    std::vector<double> grid;
    grid.reserve(bandwidth_scales.size());
    for (double s : bandwidth_scales) grid.push_back(med * s);
    return grid;
}

std::vector<double> UlsifSettings::lambda_grid() const {
    return lambdas.empty() ? ulsif::default_lambda_grid() : lambdas;
}

namespace {

double scores_max(const ulsif::AnomalyScores& s) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : s.scores) m = std::max(m, v);
    return m;
}

// Fit one direction and score the elements of both f and f' under it.
void score_direction(const ulsif::Samples& inlier, const ulsif::Samples& test,
                     const UlsifSettings& settings, ulsif::UlsifModel& model,
                     ulsif::AnomalyScores& scores) {
    model = ulsif::select_model(inlier, test, settings.bandwidth_grid(inlier, test),
                                settings.lambda_grid());
    scores = ulsif::anomaly_scores(model, inlier, ulsif::SampleOrigin::inlier);
    ulsif::append_scores(scores, ulsif::anomaly_scores(model, test, ulsif::SampleOrigin::test));
}

} // namespace

ComparisonResult score_pair(const fingerprint::FrequencyFingerprint& fp, int path,
                            std::pair<int, int> pair, const UlsifSettings& settings) {
    ComparisonResult result;
    result.path = path;
    result.col_left = pair.first;
    result.col_right = pair.second;

    const auto left = fingerprint::column_vector(fp, path, pair.first).values;
    const auto right = fingerprint::column_vector(fp, path, pair.second).values;

    score_direction(left, right, settings, result.forward_model, result.forward);
    score_direction(right, left, settings, result.backward_model, result.backward);
    result.max_score = std::max(scores_max(result.forward), scores_max(result.backward));
    return result;
}

DeviceScore aggregate_device(std::string device_id, int path_count,
                             std::vector<ComparisonResult> comparisons) {
    DeviceScore score;
    score.device_id = std::move(device_id);
    score.path_max.assign(static_cast<std::size_t>(path_count),
                          -std::numeric_limits<double>::infinity());
    for (const auto& c : comparisons) {
        auto& slot = score.path_max[static_cast<std::size_t>(c.path)];
        slot = std::max(slot, c.max_score);
    }
    score.statistic = -std::numeric_limits<double>::infinity();
    for (double v : score.path_max) score.statistic = std::max(score.statistic, v);
    score.comparisons = std::move(comparisons);
    return score;
}

DeviceScore score_device(const fingerprint::FrequencyFingerprint& fp,
                         const UlsifSettings& settings, unsigned threads) {
    const auto pairs = fingerprint::adjacent_pairs(fp.layout());
    const int paths = fp.layout().paths();

    std::vector<ComparisonResult> results(pairs.size() * static_cast<std::size_t>(paths));
    parallel_for(
        results.size(),
        [&](std::size_t i) {
            const int path = static_cast<int>(i / pairs.size());
            const auto& pair = pairs[i % pairs.size()];
            results[i] = score_pair(fp, path, pair, settings);
        },
        threads);

    return aggregate_device(fp.device_id(), paths, std::move(results));
}

std::vector<Verdict> classify(const std::vector<DeviceScore>& scores, double threshold) {
    if (!std::isfinite(threshold)) throw ValidationError("classify: threshold must be finite");
    std::vector<Verdict> verdicts;
    verdicts.reserve(scores.size());
    for (const auto& s : scores) {
        verdicts.push_back({s.device_id, s.statistic, threshold, s.statistic > threshold});
    }
    return verdicts;
}

} // namespace rofp::detector
