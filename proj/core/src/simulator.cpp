#include "rofp/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "rofp/rng.hpp"

namespace rofp::sim {

double aging_profile(double stress_hours) {
    if (stress_hours < 0.0) throw ValidationError("aging_profile: negative stress time");
    return std::min(stress_hours / 6.0, 1.5);
}

double thermal_acceleration_factor(const ThermalParams& p) {
    if (!(p.activation_energy_ev > 0.0) || !(p.boltzmann_ev_per_k > 0.0) ||
        !(p.t_op_kelvin > 0.0) || !(p.t_stress_kelvin > 0.0)) {
        throw ValidationError("thermal_acceleration_factor: parameters must be positive");
    }
    if (!(p.t_stress_kelvin >= p.t_op_kelvin)) {
        throw ValidationError("thermal_acceleration_factor: stress temperature must not be below operating temperature");
    }
    return std::exp((p.activation_energy_ev / p.boltzmann_ev_per_k) *
                    (1.0 / p.t_op_kelvin - 1.0 / p.t_stress_kelvin));
}

fingerprint::FrequencyFingerprint generate_fresh(const fingerprint::DeviceLayout& layout,
                                                 const VariationModel& vm,
                                                 std::uint64_t seed,
                                                 const std::string& device_id) {
    layout.validate();
    if (vm.random_sigma < 0.0) throw ValidationError("generate_fresh: random_sigma must be >= 0");
    if (!(vm.nominal_mhz > 0.0)) throw ValidationError("generate_fresh: nominal_mhz must be > 0");
    if (!vm.path_offsets.empty() &&
        vm.path_offsets.size() != static_cast<std::size_t>(layout.paths())) {
        throw ValidationError("generate_fresh: path_offsets size must match path count");
    }

    Rng rng(seed);
    Poly2 poly = vm.systematic;
    // lot-to-lot jitter: each coefficient scaled by 1 + jitter * U(-1, 1)
    for (double* c : {&poly.x, &poly.y, &poly.xx, &poly.xy, &poly.yy}) {
        *c *= 1.0 + vm.coeff_jitter * rng.uniform(-1.0, 1.0);
    }

    fingerprint::FrequencyFingerprint fp(device_id, layout);
    for (int p = 0; p < layout.paths(); ++p) {
        const double offset = vm.path_offsets.empty() ? 0.0 : vm.path_offsets[static_cast<std::size_t>(p)];
        for (const auto& [start, end] : layout.column_groups) {
            for (int c = start; c <= end; ++c) {
                for (int r = 0; r < layout.rows; ++r) {
                    const double noise = vm.random_sigma == 0.0 ? 0.0 : rng.normal(0.0, vm.random_sigma);
                    fp.set(p, c, r, vm.nominal_mhz + offset + poly.eval(c, r) + noise);
                }
            }
        }
    }
    return fp;
}

namespace {

double spatial_weight(const CellRect& region, double falloff_cols, int col, int row) {
    const double dcol = col < region.col_lo   ? region.col_lo - col
                        : col > region.col_hi ? col - region.col_hi
                                              : 0;
    const double drow = row < region.row_lo   ? region.row_lo - row
                        : row > region.row_hi ? row - region.row_hi
                                              : 0;
    const double dist = std::max(dcol, drow);
    if (dist == 0.0) return 1.0;
    if (falloff_cols <= 0.0) return 0.0;
    return std::max(0.0, 1.0 - dist / falloff_cols);
}

} // namespace

fingerprint::FrequencyFingerprint apply_aging(const fingerprint::FrequencyFingerprint& fp,
                                              const AgingSpec& spec,
                                              std::uint64_t seed) {
    if (spec.magnitude_at_6h < 0.0) throw ValidationError("apply_aging: magnitude must be >= 0");
    if (spec.stress_hours < 0.0) throw ValidationError("apply_aging: negative stress time");
    const auto& layout = fp.layout();

    bool intersects = false;
    for (const auto& [start, end] : layout.column_groups) {
        if (spec.region.col_lo <= end && spec.region.col_hi >= start &&
            spec.region.row_lo <= layout.rows - 1 && spec.region.row_hi >= 0) {
            intersects = true;
            break;
        }
    }
    if (!intersects) {
        throw InvalidRegionError("apply_aging: region does not intersect the device layout");
    }

    Rng rng(seed);
    std::vector<double> path_scale(static_cast<std::size_t>(layout.paths()), 1.0);
    if (spec.per_path_scaling) {
        for (auto& s : path_scale) s = 1.0 + 0.1 * rng.uniform(-1.0, 1.0);
    }

    const double drop_core = aging_profile(spec.stress_hours) * spec.magnitude_at_6h;
    fingerprint::FrequencyFingerprint aged = fp;
    if (drop_core == 0.0) return aged;

    for (int p = 0; p < layout.paths(); ++p) {
        for (const auto& [start, end] : layout.column_groups) {
            for (int c = start; c <= end; ++c) {
                for (int r = 0; r < layout.rows; ++r) {
                    const double w = spatial_weight(spec.region, spec.falloff_cols, c, r);
                    if (w == 0.0) continue;
                    const double f = fp.at(p, c, r) - drop_core * w * path_scale[static_cast<std::size_t>(p)];
                    aged.set(p, c, r, std::max(f, 1e-3));  // frequencies stay positive
                }
            }
        }
    }
    return aged;
}

} // namespace rofp::sim
