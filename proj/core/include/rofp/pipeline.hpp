#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rofp/baseline.hpp"
#include "rofp/detector.hpp"
#include "rofp/report.hpp"
#include "rofp/simulator.hpp"

namespace rofp::pipeline {

/// One aged device in a cohort: reuses the fresh surface of device number
/// `device` (1-based) and applies the given aging.
struct AgedEntry {
    int device = 1;
    std::string group;  // output subdirectory, e.g. the user-circuit name
    sim::AgingSpec spec;
};

/// Cohort simulation config (JSON). All randomness flows from `seed`:
/// device i draws its seed from a splitmix64 sequence over the master seed.
struct SimConfig {
    std::uint64_t seed = 0;
    fingerprint::DeviceLayout layout;
    sim::VariationModel variation;
    int fresh_count = 0;
    std::vector<AgedEntry> aged;
};

SimConfig load_sim_config(const std::filesystem::path& path);

/// uLSIF settings for the reference cohort runs: the median-heuristic
/// bandwidth scales and the ridge ladder narrowed to the rungs that are ever
/// selected on this data, keeping the full-cohort sweep inside its time
/// budget without changing any device statistic.
detector::UlsifSettings reference_settings();

/// Writes fresh/<id>.csv (+ shared fresh/layout.json) and
/// aged/<group>/<id>.csv (+ layout.json per group directory).
void run_simulate(const SimConfig& config, const std::filesystem::path& out_dir);

/// All measurement CSVs of a directory, sorted by filename; the layout
/// manifest is the directory's layout.json sidecar.
std::vector<std::filesystem::path> list_fingerprints(const std::filesystem::path& dir);

fingerprint::FrequencyFingerprint load_fingerprint_auto(const std::filesystem::path& csv_path);

struct EvaluateResult {
    std::vector<detector::DeviceScore> scores;  // sorted by device id
    std::vector<double> fresh_stats;            // sorted by device id
    std::map<std::string, std::vector<double>> aged_stats;  // per group
    report::RocCurve combined;
    std::map<std::string, report::RocCurve> per_group;
    double best_threshold = 0.0;  // threshold of the combined best point
    std::vector<detector::Verdict> verdicts;
};

/// Scores every device, sweeps the ROC (combined plus one per aged group)
/// and writes roc*.csv/svg, scores.csv and verdicts.csv under out_dir.
EvaluateResult run_evaluate(const std::filesystem::path& fresh_dir,
                            const std::vector<std::filesystem::path>& aged_dirs,
                            const std::filesystem::path& out_dir,
                            const detector::UlsifSettings& settings = {},
                            unsigned threads = 0);

/// The conventional baseline over whole directories; one verdict per device.
std::vector<baseline::BaselineVerdict> run_baseline_dirs(
    const std::vector<std::filesystem::path>& dirs, const baseline::SelectionSpec& selection,
    const std::vector<int>& k_candidates = {2, 3, 4}, int fresh_reference_k = 2);

} // namespace rofp::pipeline
