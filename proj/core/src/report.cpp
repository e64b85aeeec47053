#include "rofp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace rofp::report {

namespace {

std::string fmt(double v, const char* spec = "%.12g") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string fmt_threshold(double t) {
    if (t == std::numeric_limits<double>::infinity()) return "inf";
    if (t == -std::numeric_limits<double>::infinity()) return "-inf";
    return fmt(t);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

double direction_max(const ulsif::AnomalyScores& s) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : s.scores) m = std::max(m, v);
    return m;
}

} // namespace

RocCurve roc(const std::vector<double>& fresh_stats, const std::vector<double>& aged_stats) {
    if (fresh_stats.empty() || aged_stats.empty()) {
        throw ValidationError("roc: both cohorts must be non-empty");
    }
    for (double v : fresh_stats) {
        if (!std::isfinite(v)) throw ValidationError("roc: non-finite fresh statistic");
    }
    for (double v : aged_stats) {
        if (!std::isfinite(v)) throw ValidationError("roc: non-finite aged statistic");
    }

    std::set<double> union_stats(fresh_stats.begin(), fresh_stats.end());
    union_stats.insert(aged_stats.begin(), aged_stats.end());

    std::vector<double> thresholds;
    thresholds.push_back(std::numeric_limits<double>::infinity());
    for (auto it = union_stats.rbegin(); it != union_stats.rend(); ++it) thresholds.push_back(*it);
    thresholds.push_back(-std::numeric_limits<double>::infinity());

    RocCurve curve;
    curve.points.reserve(thresholds.size());
    for (double t : thresholds) {
        const auto above = [t](double v) { return v > t; };
        const double fpr = static_cast<double>(std::count_if(fresh_stats.begin(), fresh_stats.end(), above)) /
                           static_cast<double>(fresh_stats.size());
        const double tpr = static_cast<double>(std::count_if(aged_stats.begin(), aged_stats.end(), above)) /
                           static_cast<double>(aged_stats.size());
        curve.points.push_back({t, fpr, tpr});
    }

    curve.auc = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        curve.auc += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
    }

    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const double gain = curve.points[i].tpr - curve.points[i].fpr;
        const bool better = gain > best ||
                            (gain == best && curve.points[i].fpr < curve.points[curve.best_index].fpr);
        if (better) {
            best = gain;
            curve.best_index = i;
        }
    }
    return curve;
}

ResidualMap residual_map(const fingerprint::FrequencyFingerprint& fp, int path) {
    ResidualMap map;
    map.path = path;
    const auto& layout = fp.layout();
    for (const auto& [start, end] : layout.column_groups) {
        for (int c = start; c < end; ++c) {
            for (int r = 0; r < layout.rows; ++r) {
                map.cells.push_back({c, r, fp.at(path, c, r) - fp.at(path, c + 1, r)});
            }
        }
    }
    return map;
}

std::string roc_csv_string(const RocCurve& curve) {
    std::string s = "threshold,fpr,tpr\n";
    for (const auto& p : curve.points) {
        s += fmt_threshold(p.threshold) + "," + fmt(p.fpr) + "," + fmt(p.tpr) + "\n";
    }
    return s;
}

std::string residual_csv_string(const ResidualMap& map) {
    std::string s = "path,col,row,residual_mhz\n";
    for (const auto& c : map.cells) {
        s += std::to_string(map.path) + "," + std::to_string(c.col) + "," + std::to_string(c.row) +
             "," + fmt(c.residual_mhz, "%.17g") + "\n";
    }
    return s;
}

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
    write_text(path, roc_csv_string(curve));
}

void write_residual_csv(const ResidualMap& map, const std::filesystem::path& path) {
    write_text(path, residual_csv_string(map));
}

void write_scores_csv(const std::vector<detector::DeviceScore>& scores,
                      const std::filesystem::path& path) {
    std::string s = "device,path,col_left,col_right,direction,score\n";
    for (const auto& dev : scores) {
        for (const auto& c : dev.comparisons) {
            const std::string prefix = dev.device_id + "," + std::to_string(c.path) + "," +
                                       std::to_string(c.col_left) + "," + std::to_string(c.col_right) + ",";
            s += prefix + "forward," + fmt(direction_max(c.forward)) + "\n";
            s += prefix + "backward," + fmt(direction_max(c.backward)) + "\n";
        }
    }
    write_text(path, s);
}

void write_verdicts_csv(const std::vector<detector::Verdict>& verdicts,
                        const std::filesystem::path& path) {
    std::string s = "device,statistic,threshold,label\n";
    for (const auto& v : verdicts) {
        s += v.device_id + "," + fmt(v.statistic) + "," + fmt(v.threshold) + "," +
             (v.recycled ? "recycled" : "fresh") + "\n";
    }
    write_text(path, s);
}

void write_silhouette_csv(const std::vector<baseline::BaselineVerdict>& verdicts,
                          const std::filesystem::path& path) {
    std::string s = "device";
    if (!verdicts.empty()) {
        for (const auto& o : verdicts.front().outcomes) s += ",silhouette_k" + std::to_string(o.k);
    }
    s += ",optimal_k,label\n";
    for (const auto& v : verdicts) {
        s += v.device_id;
        for (const auto& o : v.outcomes) s += "," + fmt(o.silhouette);
        s += "," + std::to_string(v.optimal_k) + "," + (v.recycled ? "recycled" : "fresh") + "\n";
    }
    write_text(path, s);
}

namespace {

// Diverging colormap for residuals: #2166ac -> #f7f7f7 -> #b2182b.
std::string residual_color(double value, double vmax) {
    constexpr int lo[3] = {0x21, 0x66, 0xac};
    constexpr int mid[3] = {0xf7, 0xf7, 0xf7};
    constexpr int hi[3] = {0xb2, 0x18, 0x2b};
    double t = vmax > 0.0 ? value / vmax : 0.0;
    t = std::clamp(t, -1.0, 1.0);
    const int* from = t < 0.0 ? lo : hi;
    const double w = std::abs(t);
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(mid[0] + (from[0] - mid[0]) * w)),
                  static_cast<int>(std::lround(mid[1] + (from[1] - mid[1]) * w)),
                  static_cast<int>(std::lround(mid[2] + (from[2] - mid[2]) * w)));
    return buf;
}

} // namespace

void write_residual_svg(const ResidualMap& map, const std::filesystem::path& path) {
    int col_lo = 0, col_hi = 0, row_lo = 0, row_hi = 0;
    double vmin = 0.0, vmax_abs = 0.0, vmax = 0.0;
    if (!map.cells.empty()) {
        col_lo = col_hi = map.cells.front().col;
        row_lo = row_hi = map.cells.front().row;
        vmin = vmax = map.cells.front().residual_mhz;
        for (const auto& c : map.cells) {
            col_lo = std::min(col_lo, c.col);
            col_hi = std::max(col_hi, c.col);
            row_lo = std::min(row_lo, c.row);
            row_hi = std::max(row_hi, c.row);
            vmin = std::min(vmin, c.residual_mhz);
            vmax = std::max(vmax, c.residual_mhz);
            vmax_abs = std::max(vmax_abs, std::abs(c.residual_mhz));
        }
    }
    const int cell = 8;
    const int margin = 4;
    const int width = (col_hi - col_lo + 1) * cell + 2 * margin;
    const int height = (row_hi - row_lo + 1) * cell + 2 * margin + 16;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\">\n";
    for (const auto& c : map.cells) {
        svg << "<rect x=\"" << margin + (c.col - col_lo) * cell << "\" y=\""
            << margin + (c.row - row_lo) * cell << "\" width=\"" << cell << "\" height=\"" << cell
            << "\" fill=\"" << residual_color(c.residual_mhz, vmax_abs) << "\"/>\n";
    }
    svg << "<text x=\"" << margin << "\" y=\"" << height - 4
        << "\" font-size=\"10\" font-family=\"monospace\">path " << map.path << "  min="
        << fmt(vmin, "%.6g") << " max=" << fmt(vmax, "%.6g") << " MHz</text>\n";
    svg << "</svg>\n";
    write_text(path, svg.str());
}

void write_roc_svg(const RocCurve& curve, const std::filesystem::path& path) {
    const int size = 360;
    const int margin = 30;
    const auto px = [&](double fpr) { return margin + fpr * (size - 2 * margin); };
    const auto py = [&](double tpr) { return size - margin - tpr * (size - 2 * margin); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\">\n";
    svg << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size - 2 * margin
        << "\" height=\"" << size - 2 * margin << "\" fill=\"none\" stroke=\"#888888\"/>\n";
    svg << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(1)
        << "\" stroke=\"#cccccc\" stroke-dasharray=\"4 3\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"#2166ac\" stroke-width=\"2\" points=\"";
    for (const auto& p : curve.points) {
        svg << fmt(px(p.fpr), "%.2f") << "," << fmt(py(p.tpr), "%.2f") << " ";
    }
    svg << "\"/>\n";
    const auto& best = curve.points[curve.best_index];
    svg << "<circle cx=\"" << fmt(px(best.fpr), "%.2f") << "\" cy=\"" << fmt(py(best.tpr), "%.2f")
        << "\" r=\"5\" fill=\"#b2182b\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << size - 8
        << "\" font-size=\"11\" font-family=\"monospace\">AUC=" << fmt(curve.auc, "%.4g")
        << " best FPR=" << fmt(best.fpr, "%.4g") << " TPR=" << fmt(best.tpr, "%.4g") << "</text>\n";
    svg << "</svg>\n";
    write_text(path, svg.str());
}

} // namespace rofp::report
