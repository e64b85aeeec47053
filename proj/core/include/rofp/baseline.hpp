#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rofp/fingerprint.hpp"

namespace rofp::baseline {

/// One k-means++ run: assignments plus the mean silhouette over all points.
struct ClusteringOutcome {
    int k = 0;
    std::vector<int> assignments;
    std::vector<double> centroids;
    double silhouette = 0.0;            // in [-1, 1]
    std::vector<double> inertia_trace;  // within-cluster SSE after each assignment step
};

/// Mean silhouette of a 1-D clustering with Euclidean distance, computed
/// exactly via per-cluster sorted prefix sums (O(n log n)). Singleton
/// clusters contribute 0 for their point.
double mean_silhouette(const std::vector<double>& points, const std::vector<int>& assignments, int k);

/// k-means++ seeding with the given seed, then Lloyd iterations until the
/// largest centroid movement drops below 1e-9 or 300 iterations pass.
/// Throws DegenerateClusteringError when k exceeds the distinct value count.
ClusteringOutcome kmeanspp(const std::vector<double>& points, int k, std::uint64_t seed);

/// Which RO sites feed the flat frequency vector: every site, or a seeded
/// random subset of `count` sites. Each selected site contributes the
/// frequencies of all LUT paths.
struct SelectionSpec {
    enum class Mode { all, random } mode = Mode::all;
    std::size_t count = 265;
    std::uint64_t seed = 0;
};

/// Flat frequency vector for clustering, site-major then path ascending.
std::vector<double> flatten_frequencies(const fingerprint::FrequencyFingerprint& fp,
                                        const SelectionSpec& selection);

struct BaselineVerdict {
    std::string device_id;
    int optimal_k = 0;        // argmax silhouette, ties to the smaller k
    int fresh_reference_k = 2;
    bool recycled = false;    // optimal_k > fresh_reference_k
    std::vector<ClusteringOutcome> outcomes;  // one per candidate k
};

/// The conventional detector: cluster raw frequencies for each candidate k,
/// pick the silhouette-optimal k and compare against the fresh reference.
BaselineVerdict baseline_detect(const fingerprint::FrequencyFingerprint& fp,
                                const SelectionSpec& selection,
                                const std::vector<int>& k_candidates = {2, 3, 4},
                                int fresh_reference_k = 2);

} // namespace rofp::baseline
