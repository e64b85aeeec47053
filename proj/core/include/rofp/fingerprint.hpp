#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rofp/errors.hpp"

namespace rofp::fingerprint {

/// CLB grid of a device: rows, column groups separated by BRAM/empty
/// barriers, LUT input count z (paths = 2^(z-1)) and RO stage count.
struct DeviceLayout {
    int rows = 0;
    std::vector<std::pair<int, int>> column_groups;  // inclusive [start, end]
    int lut_inputs = 6;
    int ro_stages = 15;

    int paths() const { return 1 << (lut_inputs - 1); }
    int total_columns() const;
    /// Dense index of a column, skipping barrier gaps; -1 if not in a group.
    int dense_column_index(int col) const;
    bool contains_column(int col) const { return dense_column_index(col) >= 0; }
    /// Throws ValidationError unless groups are non-empty, ordered and disjoint.
    void validate() const;
};

bool operator==(const DeviceLayout& a, const DeviceLayout& b);

/// Per-device, per-LUT-path grid of RO frequencies in MHz.
/// Cells are dense: every (path, column-in-group, row) is populated.
class FrequencyFingerprint {
public:
    FrequencyFingerprint() = default;
    FrequencyFingerprint(std::string device_id, DeviceLayout layout);

    const std::string& device_id() const { return device_id_; }
    void set_device_id(std::string id) { device_id_ = std::move(id); }
    const DeviceLayout& layout() const { return layout_; }

    double at(int path, int col, int row) const;
    void set(int path, int col, int row, double freq_mhz);

    std::size_t cell_count() const { return freqs_.size(); }
    /// Throws ValidationError if any cell is non-positive or non-finite.
    void validate() const;

private:
    std::size_t index(int path, int col, int row) const;

    std::string device_id_;
    DeviceLayout layout_;
    std::vector<int> dense_cols_;  // column index per dense slot, ascending
    std::vector<double> freqs_;
};

/// One column of one path, ordered by ascending row index.
struct ColumnVector {
    int path = 0;
    int column = 0;
    std::vector<double> values;
};

/// Frequencies of (path, col) in row order; length equals layout rows.
/// Throws IndexError for an out-of-range path or a column inside a barrier.
ColumnVector column_vector(const FrequencyFingerprint& fp, int path, int col);

/// All (left, right) consecutive column pairs within each group; pairs never
/// straddle a group boundary. |pairs| = sum over groups of (width - 1).
std::vector<std::pair<int, int>> adjacent_pairs(const DeviceLayout& layout);

/// Layout manifest (JSON: device_id, rows, column_groups, lut_inputs,
/// ro_stages). An empty device_id marks a shared manifest; readers then
/// take the device id from the measurement file name.
void write_layout(const DeviceLayout& layout, const std::string& device_id,
                  const std::filesystem::path& path);
std::pair<DeviceLayout, std::string> read_layout(const std::filesystem::path& path);

/// Measurement CSV only: header exactly `path,col,row,freq_mhz`, LF endings,
/// frequencies printed losslessly.
void write_measurements(const FrequencyFingerprint& fp,
                        const std::filesystem::path& csv_path);

/// Measurement CSV plus a manifest carrying the device id. For a batch of
/// devices sharing one layout, write one manifest with write_layout and the
/// CSVs with write_measurements instead.
void write_fingerprint(const FrequencyFingerprint& fp,
                       const std::filesystem::path& csv_path,
                       const std::filesystem::path& manifest_path);
FrequencyFingerprint read_fingerprint(const std::filesystem::path& csv_path,
                                      const std::filesystem::path& manifest_path);

} // namespace rofp::fingerprint
