#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rofp/baseline.hpp"
#include "rofp/detector.hpp"
#include "rofp/fingerprint.hpp"

namespace rofp::report {

struct RocPoint {
    double threshold = 0.0;  // +-infinity at the sentinels
    double fpr = 0.0;        // fraction of fresh statistics above threshold
    double tpr = 0.0;        // fraction of aged statistics above threshold
};

struct RocCurve {
    std::vector<RocPoint> points;  // threshold descending: (0,0) -> (1,1)
    double auc = 0.0;              // trapezoid rule
    std::size_t best_index = 0;    // max TPR-FPR, ties to the lower FPR
};

/// Sweeps thresholds over the union of both cohorts' statistics plus
/// +-infinity sentinels. Throws ValidationError on an empty cohort.
RocCurve roc(const std::vector<double>& fresh_stats, const std::vector<double>& aged_stats);

/// Residuals freq(col,row) - freq(col+1,row) of one path, indexed at the
/// left column; only columns with a right neighbor in the same group appear.
struct ResidualCell {
    int col = 0;
    int row = 0;
    double residual_mhz = 0.0;
};

struct ResidualMap {
    int path = 0;
    std::vector<ResidualCell> cells;  // ordered by (col, row)
};

ResidualMap residual_map(const fingerprint::FrequencyFingerprint& fp, int path);

/// CSV writers; byte-deterministic for identical inputs.
void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path);
void write_residual_csv(const ResidualMap& map, const std::filesystem::path& path);
void write_scores_csv(const std::vector<detector::DeviceScore>& scores,
                      const std::filesystem::path& path);
void write_verdicts_csv(const std::vector<detector::Verdict>& verdicts,
                        const std::filesystem::path& path);
/// Silhouette table shaped like the conventional-method comparison tables:
/// one row per device, one column per candidate k, optimal k last.
void write_silhouette_csv(const std::vector<baseline::BaselineVerdict>& verdicts,
                          const std::filesystem::path& path);

/// SVG writers. The residual colormap is a symmetric diverging scale
/// centered at zero: -max |r| maps to #2166ac, 0 to #f7f7f7, +max |r| to
/// #b2182b, linearly interpolated per channel; min/max are printed into
/// the image. The ROC is a polyline with the best point marked.
void write_roc_svg(const RocCurve& curve, const std::filesystem::path& path);
void write_residual_svg(const ResidualMap& map, const std::filesystem::path& path);

std::string roc_csv_string(const RocCurve& curve);
std::string residual_csv_string(const ResidualMap& map);

} // namespace rofp::report
