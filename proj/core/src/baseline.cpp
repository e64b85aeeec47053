#include "rofp/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "rofp/rng.hpp"

namespace rofp::baseline {

namespace {

// Sorted cluster values with prefix sums; mean |x - y| over the cluster in
// O(log m) per query.
struct ClusterIndex {
    std::vector<double> sorted;
    std::vector<double> prefix;  // prefix[i] = sum of sorted[0..i)

    void build(std::vector<double> values) {
        std::sort(values.begin(), values.end());
        sorted = std::move(values);
        prefix.assign(sorted.size() + 1, 0.0);
        for (std::size_t i = 0; i < sorted.size(); ++i) prefix[i + 1] = prefix[i] + sorted[i];
    }

    double sum_abs_dev(double x) const {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
        const auto le = static_cast<std::size_t>(it - sorted.begin());
        const double sum_le = prefix[le];
        const double sum_gt = prefix[sorted.size()] - sum_le;
        const auto gt = sorted.size() - le;
        return (static_cast<double>(le) * x - sum_le) + (sum_gt - static_cast<double>(gt) * x);
    }
};

} // namespace

double mean_silhouette(const std::vector<double>& points, const std::vector<int>& assignments, int k) {
    const std::size_t n = points.size();
    if (assignments.size() != n) throw ValidationError("mean_silhouette: size mismatch");
    if (k < 2) throw ValidationError("mean_silhouette: need at least two clusters");

    std::vector<std::vector<double>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        const int a = assignments[i];
        if (a < 0 || a >= k) throw ValidationError("mean_silhouette: assignment out of range");
        members[static_cast<std::size_t>(a)].push_back(points[i]);
    }
    std::vector<ClusterIndex> index(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) index[static_cast<std::size_t>(c)].build(members[static_cast<std::size_t>(c)]);

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(assignments[i]);
        const std::size_t own_size = index[own].sorted.size();
        if (own_size <= 1) continue;  // singleton: s = 0
        const double a = index[own].sum_abs_dev(points[i]) / static_cast<double>(own_size - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
            if (c == own || index[c].sorted.empty()) continue;
            b = std::min(b, index[c].sum_abs_dev(points[i]) / static_cast<double>(index[c].sorted.size()));
        }
        if (!std::isfinite(b)) continue;  // no other non-empty cluster
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

ClusteringOutcome kmeanspp(const std::vector<double>& points, int k, std::uint64_t seed) {
    const std::size_t n = points.size();
    if (k < 2) throw ValidationError("kmeanspp: k must be >= 2");
    if (n < static_cast<std::size_t>(k)) throw ValidationError("kmeanspp: fewer points than clusters");
    const std::set<double> distinct(points.begin(), points.end());
    if (distinct.size() < static_cast<std::size_t>(k)) {
        throw DegenerateClusteringError("kmeanspp: only " + std::to_string(distinct.size()) +
                                        " distinct values for k=" + std::to_string(k));
    }

    Rng rng(seed);
    std::vector<double> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    centroids.push_back(points[rng.below(n)]);

    std::vector<double> d2(n);
    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : centroids) {
                const double d = points[i] - c;
                best = std::min(best, d * d);
            }
            d2[i] = best;
            total += best;
        }
        const double r = rng.uniform01() * total;
        double cum = 0.0;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            cum += d2[i];
            if (cum > r && d2[i] > 0.0) {
                pick = i;
                break;
            }
        }
        centroids.push_back(points[pick]);
    }

    std::vector<int> assignments(n, 0);
    std::vector<double> inertia_trace;
    for (int iter = 0; iter < 300; ++iter) {
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int c = 0; c < k; ++c) {
                const double d = points[i] - centroids[static_cast<std::size_t>(c)];
                const double dd = d * d;
                if (dd < best) {  // strict: ties keep the lower cluster index
                    best = dd;
                    arg = c;
                }
            }
            assignments[i] = arg;
            inertia += best;
        }
        inertia_trace.push_back(inertia);

        std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[static_cast<std::size_t>(assignments[i])] += points[i];
            counts[static_cast<std::size_t>(assignments[i])] += 1;
        }

        double moved = 0.0;
        for (int c = 0; c < k; ++c) {
            const auto cs = static_cast<std::size_t>(c);
            double next;
            if (counts[cs] == 0) {
                // re-seed an empty cluster at the point farthest from its centroid
                double far_d = -1.0;
                std::size_t far_i = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = std::abs(points[i] - centroids[static_cast<std::size_t>(assignments[i])]);
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                next = points[far_i];
            } else {
                next = sums[cs] / static_cast<double>(counts[cs]);
            }
            moved = std::max(moved, std::abs(next - centroids[cs]));
            centroids[cs] = next;
        }
        if (moved < 1e-9) break;
    }

    // final assignment against the converged centroids
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int c = 0; c < k; ++c) {
            const double d = points[i] - centroids[static_cast<std::size_t>(c)];
            const double dd = d * d;
            if (dd < best) {
                best = dd;
                arg = c;
            }
        }
        assignments[i] = arg;
    }

    ClusteringOutcome out;
    out.k = k;
    out.assignments = std::move(assignments);
    out.centroids = std::move(centroids);
    out.silhouette = mean_silhouette(points, out.assignments, k);
    out.inertia_trace = std::move(inertia_trace);
    return out;
}

std::vector<double> flatten_frequencies(const fingerprint::FrequencyFingerprint& fp,
                                        const SelectionSpec& selection) {
    const auto& layout = fp.layout();
    std::vector<std::pair<int, int>> sites;  // (col, row), column ascending across groups
    for (const auto& [start, end] : layout.column_groups) {
        for (int c = start; c <= end; ++c) {
            for (int r = 0; r < layout.rows; ++r) sites.emplace_back(c, r);
        }
    }

    if (selection.mode == SelectionSpec::Mode::random) {
        if (selection.count == 0) throw ValidationError("selection: count must be >= 1");
        if (selection.count > sites.size()) {
            throw ValidationError("selection: count exceeds the " + std::to_string(sites.size()) +
                                  " available RO sites");
        }
        Rng rng(selection.seed);
        // partial Fisher-Yates: the first `count` slots become the sample
        for (std::size_t i = 0; i < selection.count; ++i) {
            const std::size_t j = i + rng.below(sites.size() - i);
            std::swap(sites[i], sites[j]);
        }
        sites.resize(selection.count);
    }

    std::vector<double> flat;
    flat.reserve(sites.size() * static_cast<std::size_t>(layout.paths()));
    for (const auto& [c, r] : sites) {
        for (int p = 0; p < layout.paths(); ++p) flat.push_back(fp.at(p, c, r));
    }
    return flat;
}

BaselineVerdict baseline_detect(const fingerprint::FrequencyFingerprint& fp,
                                const SelectionSpec& selection,
                                const std::vector<int>& k_candidates,
                                int fresh_reference_k) {
    if (k_candidates.empty()) throw ValidationError("baseline_detect: no candidate cluster counts");
    std::vector<int> ks = k_candidates;
    std::sort(ks.begin(), ks.end());

    const std::vector<double> flat = flatten_frequencies(fp, selection);

    BaselineVerdict verdict;
    verdict.device_id = fp.device_id();
    verdict.fresh_reference_k = fresh_reference_k;
    double best_sil = -std::numeric_limits<double>::infinity();
    for (int k : ks) {
        ClusteringOutcome outcome = kmeanspp(flat, k, selection.seed);
        if (outcome.silhouette > best_sil) {  // strict: ties favor the smaller k
            best_sil = outcome.silhouette;
            verdict.optimal_k = k;
        }
        verdict.outcomes.push_back(std::move(outcome));
    }
    verdict.recycled = verdict.optimal_k > fresh_reference_k;
    return verdict;
}

} // namespace rofp::baseline
