#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rofp {

/// splitmix64 mixing step; used to derive independent per-device seeds
/// from one master seed without correlated mt19937 streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic PRNG with pinned sampling algorithms.
///
/// std::normal_distribution and friends are implementation-defined, so this
/// wrapper draws from mt19937_64 (whose output sequence the standard pins)
/// and applies fixed transforms: 53-bit uniforms and Box-Muller normals.
/// Identical seeds give identical streams on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1]; never zero, safe under log().
    double uniform01_open_low() {
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (cosine branch, two u64 draws each).
    double normal() {
        const double u1 = uniform01_open_low();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Uniform integer in [0, n). Modulo bias is below 2^-40 for the n used
    /// here (cell counts, cluster counts) and identical on every platform.
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
};

} // namespace rofp
