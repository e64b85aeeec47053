#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rofp/fingerprint.hpp"

namespace rofp::sim {

/// Degree-2 systematic surface in raw (col, row) coordinates, MHz.
struct Poly2 {
    double x = 0.0, y = 0.0, xx = 0.0, xy = 0.0, yy = 0.0;

    double eval(double col, double row) const {
        return x * col + y * row + xx * col * col + xy * col * row + yy * row * row;
    }
};

/// Process-variation model: smooth systematic surface plus zero-mean
/// Gaussian noise per cell, with per-path nominal offsets.
struct VariationModel {
    double nominal_mhz = 200.0;
    Poly2 systematic;
    double coeff_jitter = 0.2;         // per-device lot-to-lot jitter, +-20%
    double random_sigma = 0.1;         // MHz
    std::vector<double> path_offsets;  // one per LUT path; empty means all zero
};

/// Rectangular aged region in (col, row) space, inclusive bounds.
struct CellRect {
    int col_lo = 0, col_hi = 0, row_lo = 0, row_hi = 0;
};

/// Localized frequency degradation: profile(t) * magnitude at the region
/// core, tapering linearly to zero over `falloff_cols` cells of Chebyshev
/// distance outside the rectangle.
struct AgingSpec {
    CellRect region;
    double stress_hours = 0.0;
    double magnitude_at_6h = 6.0;  // MHz drop at the core for t = 6
    double falloff_cols = 1.0;
    bool per_path_scaling = false;  // optional +-10% per-path jitter hook
};

/// Fraction of magnitude_at_6h applied after t stress hours: t/6 clipped
/// to [0, 1.5]. Monotone, zero at t = 0.
double aging_profile(double stress_hours);

/// Arrhenius thermal acceleration factor parameters.
struct ThermalParams {
    double activation_energy_ev = 0.5;
    double boltzmann_ev_per_k = 8.62e-5;
    double t_op_kelvin = 313.0;
    double t_stress_kelvin = 408.0;
};

/// F_T = exp((E_a / k) (1/T_op - 1/T_stress)).
double thermal_acceleration_factor(const ThermalParams& p);

/// Generates a fresh fingerprint. freq(path, col, row) = nominal +
/// path_offset + poly(col, row) + N(0, sigma^2), with the polynomial
/// coefficients jittered per device (lot-to-lot variation). The PRNG
/// stream is consumed in a fixed order (5 coefficient jitters, then cells
/// path-major, column ascending across groups, row ascending), so a seed
/// pins the fingerprint bit for bit.
fingerprint::FrequencyFingerprint generate_fresh(const fingerprint::DeviceLayout& layout,
                                                 const VariationModel& vm,
                                                 std::uint64_t seed,
                                                 const std::string& device_id = "sim");

/// Returns a copy with frequencies lowered inside region + falloff.
/// Cells outside are bit-identical to the input. Throws InvalidRegionError
/// if the region misses the layout entirely. The seed only feeds the
/// optional per-path scaling hook; the default field is deterministic.
fingerprint::FrequencyFingerprint apply_aging(const fingerprint::FrequencyFingerprint& fp,
                                              const AgingSpec& spec,
                                              std::uint64_t seed);

} // namespace rofp::sim
