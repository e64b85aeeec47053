#include "rofp/fingerprint.hpp"

#include "json.hpp"  // vendored nlohmann/json

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace rofp::fingerprint {

using nlohmann::json;

int DeviceLayout::total_columns() const {
    int total = 0;
    for (const auto& [start, end] : column_groups) total += end - start + 1;
    return total;
}

int DeviceLayout::dense_column_index(int col) const {
    int base = 0;
    for (const auto& [start, end] : column_groups) {
        if (col >= start && col <= end) return base + (col - start);
        base += end - start + 1;
    }
    return -1;
}

void DeviceLayout::validate() const {
    if (rows <= 0) throw ValidationError("layout: rows must be positive");
    if (lut_inputs <= 0 || lut_inputs > 20) throw ValidationError("layout: bad lut_inputs");
    if (ro_stages <= 0) throw ValidationError("layout: ro_stages must be positive");
    if (column_groups.empty()) throw ValidationError("layout: no column groups");
    int prev_end = -1;
    for (const auto& [start, end] : column_groups) {
        if (start < 0 || end < start) throw ValidationError("layout: malformed column group");
        if (start <= prev_end) throw ValidationError("layout: column groups overlap or are unordered");
        prev_end = end;
    }
}

bool operator==(const DeviceLayout& a, const DeviceLayout& b) {
    return a.rows == b.rows && a.column_groups == b.column_groups &&
           a.lut_inputs == b.lut_inputs && a.ro_stages == b.ro_stages;
}

FrequencyFingerprint::FrequencyFingerprint(std::string device_id, DeviceLayout layout)
    : device_id_(std::move(device_id)), layout_(std::move(layout)) {
    layout_.validate();
    for (const auto& [start, end] : layout_.column_groups) {
        for (int c = start; c <= end; ++c) dense_cols_.push_back(c);
    }
    freqs_.assign(static_cast<std::size_t>(layout_.paths()) * dense_cols_.size() *
                      static_cast<std::size_t>(layout_.rows),
                  0.0);
}

std::size_t FrequencyFingerprint::index(int path, int col, int row) const {
    if (path < 0 || path >= layout_.paths()) {
        throw IndexError("path " + std::to_string(path) + " out of range (device has " +
                         std::to_string(layout_.paths()) + " LUT paths)");
    }
    const int dense = layout_.dense_column_index(col);
    if (dense < 0) {
        throw IndexError("column " + std::to_string(col) + " is not inside any column group");
    }
    if (row < 0 || row >= layout_.rows) {
        throw IndexError("row " + std::to_string(row) + " out of range");
    }
    return (static_cast<std::size_t>(path) * dense_cols_.size() + static_cast<std::size_t>(dense)) *
               static_cast<std::size_t>(layout_.rows) +
           static_cast<std::size_t>(row);
}

double FrequencyFingerprint::at(int path, int col, int row) const {
    return freqs_[index(path, col, row)];
}

void FrequencyFingerprint::set(int path, int col, int row, double freq_mhz) {
    freqs_[index(path, col, row)] = freq_mhz;
}

void FrequencyFingerprint::validate() const {
    for (double f : freqs_) {
        if (!(f > 0.0) || !std::isfinite(f)) {
            throw ValidationError("fingerprint " + device_id_ +
                                  ": all frequencies must be positive and finite");
        }
    }
}

ColumnVector column_vector(const FrequencyFingerprint& fp, int path, int col) {
    ColumnVector cv;
    cv.path = path;
    cv.column = col;
    cv.values.reserve(static_cast<std::size_t>(fp.layout().rows));
    for (int r = 0; r < fp.layout().rows; ++r) cv.values.push_back(fp.at(path, col, r));
    return cv;
}

std::vector<std::pair<int, int>> adjacent_pairs(const DeviceLayout& layout) {
    std::vector<std::pair<int, int>> pairs;
    for (const auto& [start, end] : layout.column_groups) {
        for (int c = start; c < end; ++c) pairs.emplace_back(c, c + 1);
    }
    return pairs;
}

namespace {

std::string format_freq(double f) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", f);
    return buf;
}

json load_json(const std::filesystem::path& path) {
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

void write_layout(const DeviceLayout& layout, const std::string& device_id,
                  const std::filesystem::path& path) {
    layout.validate();
    json groups = json::array();
    for (const auto& [start, end] : layout.column_groups) groups.push_back({start, end});
    json j{{"device_id", device_id},
           {"rows", layout.rows},
           {"column_groups", groups},
           {"lut_inputs", layout.lut_inputs},
           {"ro_stages", layout.ro_stages}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

std::pair<DeviceLayout, std::string> read_layout(const std::filesystem::path& path) {
    const json j = load_json(path);
    DeviceLayout layout;
    std::string device_id;
    try {
        device_id = j.at("device_id").get<std::string>();
        layout.rows = j.at("rows").get<int>();
        layout.lut_inputs = j.at("lut_inputs").get<int>();
        layout.ro_stages = j.at("ro_stages").get<int>();
        for (const auto& g : j.at("column_groups")) {
            if (!g.is_array() || g.size() != 2) {
                throw ParseError(path.string() + ": column_groups entries must be [start,end]");
            }
            layout.column_groups.emplace_back(g[0].get<int>(), g[1].get<int>());
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    layout.validate();
    return {layout, device_id};
}

void write_fingerprint(const FrequencyFingerprint& fp,
                       const std::filesystem::path& csv_path,
                       const std::filesystem::path& manifest_path) {
    write_layout(fp.layout(), fp.device_id(), manifest_path);
    write_measurements(fp, csv_path);
}

void write_measurements(const FrequencyFingerprint& fp, const std::filesystem::path& csv_path) {
    fp.validate();
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + csv_path.string());
    out << "path,col,row,freq_mhz\n";
    const auto& layout = fp.layout();
    for (int p = 0; p < layout.paths(); ++p) {
        for (const auto& [start, end] : layout.column_groups) {
            for (int c = start; c <= end; ++c) {
                for (int r = 0; r < layout.rows; ++r) {
                    out << p << ',' << c << ',' << r << ',' << format_freq(fp.at(p, c, r)) << '\n';
                }
            }
        }
    }
    if (!out) throw IoError("write failed for " + csv_path.string());
}

FrequencyFingerprint read_fingerprint(const std::filesystem::path& csv_path,
                                      const std::filesystem::path& manifest_path) {
    auto [layout, manifest_id] = read_layout(manifest_path);
    std::string device_id = manifest_id.empty() ? csv_path.stem().string() : manifest_id;

    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + csv_path.string());

    FrequencyFingerprint fp(device_id, layout);
    std::vector<bool> seen(fp.cell_count(), false);

    std::string line;
    if (!std::getline(in, line)) throw ParseError(csv_path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "path,col,row,freq_mhz") {
        throw ParseError(csv_path.string() + ": expected header path,col,row,freq_mhz");
    }

    std::size_t lineno = 1;
    std::size_t filled = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const char* p = line.data();
        const char* end = p + line.size();
        auto parse_int = [&](int& value) {
            auto [ptr, ec] = std::from_chars(p, end, value);
            if (ec != std::errc() || ptr == end || *ptr != ',') {
                throw ParseError(csv_path.string() + ":" + std::to_string(lineno) + ": malformed row");
            }
            p = ptr + 1;
        };
        int path = 0, col = 0, row = 0;
        parse_int(path);
        parse_int(col);
        parse_int(row);
        double freq = 0.0;
        auto [ptr, ec] = std::from_chars(p, end, freq);
        if (ec != std::errc() || ptr != end) {
            throw ParseError(csv_path.string() + ":" + std::to_string(lineno) + ": malformed frequency");
        }

        if (path < 0 || path >= layout.paths() || layout.dense_column_index(col) < 0 ||
            row < 0 || row >= layout.rows) {
            throw LayoutMismatchError(csv_path.string() + ":" + std::to_string(lineno) +
                                      ": cell (" + std::to_string(path) + "," + std::to_string(col) +
                                      "," + std::to_string(row) + ") is outside the layout");
        }
        const int dense = layout.dense_column_index(col);
        const std::size_t slot =
            (static_cast<std::size_t>(path) * static_cast<std::size_t>(layout.total_columns()) +
             static_cast<std::size_t>(dense)) *
                static_cast<std::size_t>(layout.rows) +
            static_cast<std::size_t>(row);
        if (seen[slot]) {
            throw DuplicateCellError(csv_path.string() + ": duplicate cell (" + std::to_string(path) +
                                     "," + std::to_string(col) + "," + std::to_string(row) + ")");
        }
        seen[slot] = true;
        ++filled;
        fp.set(path, col, row, freq);
    }

    if (filled != fp.cell_count()) {
        // name the first missing coordinate
        for (int p = 0; p < layout.paths(); ++p) {
            for (const auto& [start, gend] : layout.column_groups) {
                for (int c = start; c <= gend; ++c) {
                    for (int r = 0; r < layout.rows; ++r) {
                        const std::size_t slot =
                            (static_cast<std::size_t>(p) *
                                 static_cast<std::size_t>(layout.total_columns()) +
                             static_cast<std::size_t>(layout.dense_column_index(c))) *
                                static_cast<std::size_t>(layout.rows) +
                            static_cast<std::size_t>(r);
                        if (!seen[slot]) {
                            throw MissingCellError(csv_path.string() + ": missing cell (" +
                                                   std::to_string(p) + "," + std::to_string(c) + "," +
                                                   std::to_string(r) + ")");
                        }
                    }
                }
            }
        }
    }
    fp.validate();
    return fp;
}

} // namespace rofp::fingerprint
