#include "rofp/pipeline.hpp"

#include "json.hpp"  // vendored nlohmann/json

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "rofp/parallel.hpp"
#include "rofp/rng.hpp"

namespace rofp::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string device_name(const char* prefix, int number) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s-%02d", prefix, number);
    return buf;
}

json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return j;
}

} // namespace

detector::UlsifSettings reference_settings() {
    detector::UlsifSettings settings;
    settings.bandwidth_scales = {0.125, 0.25, 0.5, 1.0, 2.0};
    settings.lambdas = {1e-3, 1e-2, 1e-1, 1.0};
    return settings;
}

SimConfig load_sim_config(const fs::path& path) {
    const json j = load_json(path);
    SimConfig cfg;
    try {
        cfg.seed = j.at("seed").get<std::uint64_t>();
        const fs::path layout_path = path.parent_path() / j.at("layout").get<std::string>();
        cfg.layout = fingerprint::read_layout(layout_path).first;

        const json& v = j.at("variation");
        cfg.variation.nominal_mhz = v.at("nominal_mhz").get<double>();
        const json& s = v.at("systematic");
        cfg.variation.systematic = {s.at("x").get<double>(), s.at("y").get<double>(),
                                    s.at("xx").get<double>(), s.at("xy").get<double>(),
                                    s.at("yy").get<double>()};
        cfg.variation.coeff_jitter = v.at("coeff_jitter").get<double>();
        cfg.variation.random_sigma = v.at("random_sigma").get<double>();
        if (v.contains("path_offsets")) {
            cfg.variation.path_offsets = v.at("path_offsets").get<std::vector<double>>();
        }

        cfg.fresh_count = j.at("fresh_count").get<int>();
        for (const json& a : j.at("aged")) {
            AgedEntry entry;
            entry.device = a.at("device").get<int>();
            entry.group = a.at("group").get<std::string>();
            const json& r = a.at("region");
            entry.spec.region = {r.at("col_lo").get<int>(), r.at("col_hi").get<int>(),
                                 r.at("row_lo").get<int>(), r.at("row_hi").get<int>()};
            entry.spec.stress_hours = a.at("stress_hours").get<double>();
            entry.spec.magnitude_at_6h = a.value("magnitude_at_6h", 6.0);
            entry.spec.falloff_cols = a.value("falloff_cols", 1.0);
            cfg.aged.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (cfg.fresh_count <= 0) throw ValidationError(path.string() + ": fresh_count must be positive");
    for (const auto& a : cfg.aged) {
        if (a.device < 1 || a.device > cfg.fresh_count) {
            throw ValidationError(path.string() + ": aged entry references device " +
                                  std::to_string(a.device) + " outside 1.." +
                                  std::to_string(cfg.fresh_count));
        }
    }
    return cfg;
}

void run_simulate(const SimConfig& cfg, const fs::path& out_dir) {
    // Per-device seeds come from one splitmix64 sequence over the master
    // seed, so adding devices never shifts earlier devices' streams.
    std::vector<std::uint64_t> device_seeds(static_cast<std::size_t>(cfg.fresh_count));
    std::uint64_t state = cfg.seed;
    for (auto& s : device_seeds) s = splitmix64(state);

    const fs::path fresh_dir = out_dir / "fresh";
    fs::create_directories(fresh_dir);
    fingerprint::write_layout(cfg.layout, "", fresh_dir / "layout.json");
    for (int i = 1; i <= cfg.fresh_count; ++i) {
        const std::string id = device_name("fresh", i);
        const auto fp = sim::generate_fresh(cfg.layout, cfg.variation,
                                            device_seeds[static_cast<std::size_t>(i - 1)], id);
        fingerprint::write_measurements(fp, fresh_dir / (id + ".csv"));
    }

    int aged_number = 0;
    for (const auto& entry : cfg.aged) {
        ++aged_number;
        const fs::path group_dir = out_dir / "aged" / entry.group;
        fs::create_directories(group_dir);
        fingerprint::write_layout(cfg.layout, "", group_dir / "layout.json");

        const std::uint64_t seed = device_seeds[static_cast<std::size_t>(entry.device - 1)];
        auto fp = sim::generate_fresh(cfg.layout, cfg.variation, seed,
                                      device_name("fresh", entry.device));
        auto aged = sim::apply_aging(fp, entry.spec, seed);
        aged.set_device_id(device_name("aged", aged_number));
        fingerprint::write_measurements(aged, group_dir / (aged.device_id() + ".csv"));
    }
}

std::vector<fs::path> list_fingerprints(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> csvs;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".csv") csvs.push_back(e.path());
    }
    std::sort(csvs.begin(), csvs.end());
    if (csvs.empty()) throw IoError("no fingerprint CSVs in " + dir.string());
    return csvs;
}

fingerprint::FrequencyFingerprint load_fingerprint_auto(const fs::path& csv_path) {
    return fingerprint::read_fingerprint(csv_path, csv_path.parent_path() / "layout.json");
}

EvaluateResult run_evaluate(const fs::path& fresh_dir, const std::vector<fs::path>& aged_dirs,
                            const fs::path& out_dir, const detector::UlsifSettings& settings,
                            unsigned threads) {
    EvaluateResult result;

    struct Job {
        fs::path csv;
        std::string group;  // empty marks the fresh cohort
    };
    std::vector<Job> jobs;
    for (const auto& csv : list_fingerprints(fresh_dir)) jobs.push_back({csv, ""});
    for (const auto& dir : aged_dirs) {
        const std::string group = dir.filename().string();
        for (const auto& csv : list_fingerprints(dir)) jobs.push_back({csv, group});
    }

    // Devices are independent; each inner scoring run stays single-threaded
    // so results are slot-deterministic for any worker count.
    std::vector<detector::DeviceScore> scores(jobs.size());
    parallel_for(
        jobs.size(),
        [&](std::size_t i) {
            scores[i] = detector::score_device(load_fingerprint_auto(jobs[i].csv), settings, 1);
        },
        threads);

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (jobs[i].group.empty()) {
            result.fresh_stats.push_back(scores[i].statistic);
        } else {
            result.aged_stats[jobs[i].group].push_back(scores[i].statistic);
        }
        result.scores.push_back(std::move(scores[i]));
    }

    std::sort(result.scores.begin(), result.scores.end(),
              [](const auto& a, const auto& b) { return a.device_id < b.device_id; });

    std::vector<double> all_aged;
    for (const auto& [group, stats] : result.aged_stats) {
        all_aged.insert(all_aged.end(), stats.begin(), stats.end());
    }
    result.combined = report::roc(result.fresh_stats, all_aged);
    for (const auto& [group, stats] : result.aged_stats) {
        result.per_group.emplace(group, report::roc(result.fresh_stats, stats));
    }
    result.best_threshold = result.combined.points[result.combined.best_index].threshold;
    result.verdicts = detector::classify(result.scores, result.best_threshold);

    fs::create_directories(out_dir);
    report::write_scores_csv(result.scores, out_dir / "scores.csv");
    report::write_verdicts_csv(result.verdicts, out_dir / "verdicts.csv");
    report::write_roc_csv(result.combined, out_dir / "roc.csv");
    report::write_roc_svg(result.combined, out_dir / "roc.svg");
    for (const auto& [group, curve] : result.per_group) {
        report::write_roc_csv(curve, out_dir / ("roc_" + group + ".csv"));
        report::write_roc_svg(curve, out_dir / ("roc_" + group + ".svg"));
    }
    return result;
}

std::vector<baseline::BaselineVerdict> run_baseline_dirs(const std::vector<fs::path>& dirs,
                                                         const baseline::SelectionSpec& selection,
                                                         const std::vector<int>& k_candidates,
                                                         int fresh_reference_k) {
    std::vector<baseline::BaselineVerdict> verdicts;
    for (const auto& dir : dirs) {
        for (const auto& csv : list_fingerprints(dir)) {
            verdicts.push_back(baseline::baseline_detect(load_fingerprint_auto(csv), selection,
                                                         k_candidates, fresh_reference_k));
        }
    }
    std::sort(verdicts.begin(), verdicts.end(),
              [](const auto& a, const auto& b) { return a.device_id < b.device_id; });
    return verdicts;
}

} // namespace rofp::pipeline
