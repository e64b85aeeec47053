// rofp: unsupervised recycled-FPGA detection over RO frequency fingerprints.
//
// Subcommands:
//   simulate   generate a synthetic fresh/aged cohort from a JSON config
//   detect     score one fingerprint with the uLSIF column-pair detector
//   baseline   conventional k-means++/silhouette detector
//   evaluate   score cohorts and sweep ROC curves
//   heatmap    residual heatmap of one LUT path (CSV or SVG)

#include "CLI11.hpp"  // vendored CLI11
#include "json.hpp"   // vendored nlohmann/json

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rofp/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct DetectorFlags {
    std::vector<double> bandwidths;
    std::vector<double> bandwidth_scales;
    std::vector<double> lambdas;
    unsigned threads = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--bandwidths", bandwidths,
                        "Absolute uLSIF bandwidth grid in MHz (default: median heuristic)");
        cmd->add_option("--bandwidth-scales", bandwidth_scales,
                        "Bandwidth grid as multiples of the pooled median distance");
        cmd->add_option("--lambdas", lambdas, "Ridge grid (default 1e-3 1e-2 1e-1 1 10)");
        cmd->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
    }

    rofp::detector::UlsifSettings settings() const { return {bandwidths, bandwidth_scales, lambdas}; }
};

fs::path manifest_for(const fs::path& csv, const std::string& layout_flag) {
    if (!layout_flag.empty()) return layout_flag;
    return csv.parent_path() / "layout.json";
}

void dump_models(const rofp::detector::DeviceScore& score, const fs::path& out) {
    json models = json::array();
    const auto add = [&](const rofp::detector::ComparisonResult& c, const char* direction,
                         const rofp::ulsif::UlsifModel& m) {
        json entry{{"path", c.path},        {"col_left", c.col_left}, {"col_right", c.col_right},
                   {"direction", direction}, {"bandwidth", m.kernel.bandwidth},
                   {"lambda", m.lambda},     {"loocv", m.loocv_score}};
        entry["centers"] = m.kernel.centers;
        entry["alpha"] = std::vector<double>(m.alpha.data(), m.alpha.data() + m.alpha.size());
        models.push_back(std::move(entry));
    };
    for (const auto& c : score.comparisons) {
        add(c, "forward", c.forward_model);
        add(c, "backward", c.backward_model);
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw rofp::IoError("cannot write " + out.string());
    f << models.dump(1) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised recycled-FPGA detection from RO frequency fingerprints"};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic device cohort");
    std::string sim_config, sim_out;
    sim_cmd->add_option("--config", sim_config, "Cohort config JSON")->required();
    sim_cmd->add_option("--out", sim_out, "Output directory")->required();

    // detect
    auto* det_cmd = app.add_subcommand("detect", "Score one fingerprint");
    std::string det_fp, det_layout, det_dump_scores, det_dump_model;
    double det_threshold = 0.0;
    bool det_have_threshold = false, det_fail_on_recycled = false;
    DetectorFlags det_flags;
    det_cmd->add_option("--fingerprint", det_fp, "Measurement CSV")->required();
    det_cmd->add_option("--layout", det_layout, "Layout manifest (default: layout.json beside the CSV)");
    auto* det_threshold_opt =
        det_cmd->add_option("--threshold", det_threshold, "Fresh/recycled threshold on the device statistic");
    det_cmd->add_option("--dump-scores", det_dump_scores, "Write per-comparison scores CSV");
    det_cmd->add_option("--dump-model", det_dump_model, "Write fitted uLSIF models as JSON");
    det_cmd->add_flag("--fail-on-recycled", det_fail_on_recycled,
                      "Exit with code 2 when the device is classified recycled");
    det_flags.attach(det_cmd);

    // baseline
    auto* base_cmd = app.add_subcommand("baseline", "Conventional k-means++/silhouette detector");
    std::string base_fp, base_layout, base_out;
    std::size_t base_select = 0;
    std::uint64_t base_seed = 0;
    int base_kmax = 4;
    base_cmd->add_option("--fingerprint", base_fp, "Measurement CSV")->required();
    base_cmd->add_option("--layout", base_layout, "Layout manifest (default: layout.json beside the CSV)");
    base_cmd->add_option("--select", base_select, "Random RO site count (default: all sites)");
    base_cmd->add_option("--seed", base_seed, "Selection/seeding PRNG seed");
    base_cmd->add_option("--k-max", base_kmax, "Largest cluster count to try (from 2)");
    base_cmd->add_option("--out", base_out, "Silhouette table CSV (default: stdout)");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Score cohorts and sweep ROC curves");
    std::string eval_fresh, eval_out;
    std::vector<std::string> eval_aged;
    DetectorFlags eval_flags;
    eval_cmd->add_option("--fresh-dir", eval_fresh, "Directory of fresh fingerprints")->required();
    eval_cmd->add_option("--aged-dir", eval_aged, "Directory of aged fingerprints (repeatable)")
        ->required();
    eval_cmd->add_option("--out", eval_out, "Report output directory")->required();
    eval_flags.attach(eval_cmd);

    // heatmap
    auto* heat_cmd = app.add_subcommand("heatmap", "Residual heatmap for one LUT path");
    std::string heat_fp, heat_layout, heat_out;
    int heat_path = 0;
    bool heat_residual = false;
    heat_cmd->add_option("--fingerprint", heat_fp, "Measurement CSV")->required();
    heat_cmd->add_option("--layout", heat_layout, "Layout manifest (default: layout.json beside the CSV)");
    heat_cmd->add_option("--path", heat_path, "LUT path id")->required();
    heat_cmd->add_flag("--residual", heat_residual, "Neighboring-column residuals (the only mode)");
    heat_cmd->add_option("--out", heat_out, "Output file; .svg renders an image, else CSV (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim_cmd) {
            const auto cfg = rofp::pipeline::load_sim_config(sim_config);
            rofp::pipeline::run_simulate(cfg, sim_out);
            std::cerr << "simulated " << cfg.fresh_count << " fresh and " << cfg.aged.size()
                      << " aged fingerprints into " << sim_out << "\n";
        } else if (*det_cmd) {
            const auto fp = rofp::fingerprint::read_fingerprint(det_fp, manifest_for(det_fp, det_layout));
            const auto score =
                rofp::detector::score_device(fp, det_flags.settings(), det_flags.threads);
            if (!det_dump_scores.empty()) {
                rofp::report::write_scores_csv({score}, det_dump_scores);
            }
            if (!det_dump_model.empty()) dump_models(score, det_dump_model);

            det_have_threshold = det_threshold_opt->count() > 0;
            std::printf("%s statistic=%.12g", score.device_id.c_str(), score.statistic);
            bool recycled = false;
            if (det_have_threshold) {
                recycled = score.statistic > det_threshold;
                std::printf(" threshold=%.12g label=%s", det_threshold,
                            recycled ? "recycled" : "fresh");
            }
            std::printf("\n");
            if (recycled && det_fail_on_recycled) return 2;
        } else if (*base_cmd) {
            const auto fp =
                rofp::fingerprint::read_fingerprint(base_fp, manifest_for(base_fp, base_layout));
            rofp::baseline::SelectionSpec selection;
            if (base_select > 0) {
                selection.mode = rofp::baseline::SelectionSpec::Mode::random;
                selection.count = base_select;
            }
            selection.seed = base_seed;
            if (base_kmax < 2) throw rofp::ValidationError("--k-max must be >= 2");
            std::vector<int> ks;
            for (int k = 2; k <= base_kmax; ++k) ks.push_back(k);
            const auto verdict = rofp::baseline::baseline_detect(fp, selection, ks);
            if (base_out.empty()) {
                std::printf("device");
                for (const auto& o : verdict.outcomes) std::printf(",silhouette_k%d", o.k);
                std::printf(",optimal_k,label\n%s", verdict.device_id.c_str());
                for (const auto& o : verdict.outcomes) std::printf(",%.12g", o.silhouette);
                std::printf(",%d,%s\n", verdict.optimal_k, verdict.recycled ? "recycled" : "fresh");
            } else {
                rofp::report::write_silhouette_csv({verdict}, base_out);
            }
        } else if (*eval_cmd) {
            std::vector<fs::path> aged_dirs(eval_aged.begin(), eval_aged.end());
            const auto result = rofp::pipeline::run_evaluate(eval_fresh, aged_dirs, eval_out,
                                                             eval_flags.settings(), eval_flags.threads);
            std::cerr << "evaluated " << result.scores.size() << " devices; combined AUC="
                      << result.combined.auc << "; report in " << eval_out << "\n";
        } else if (*heat_cmd) {
            if (!heat_residual) {
                throw rofp::ValidationError("heatmap: pass --residual (raw-frequency maps are not supported)");
            }
            const auto fp =
                rofp::fingerprint::read_fingerprint(heat_fp, manifest_for(heat_fp, heat_layout));
            const auto map = rofp::report::residual_map(fp, heat_path);
            if (heat_out.empty()) {
                std::fputs(rofp::report::residual_csv_string(map).c_str(), stdout);
            } else if (fs::path(heat_out).extension() == ".svg") {
                rofp::report::write_residual_svg(map, heat_out);
            } else {
                rofp::report::write_residual_csv(map, heat_out);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
