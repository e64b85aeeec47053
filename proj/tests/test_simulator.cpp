#include "doctest.h"

#include <cmath>

#include "test_support.hpp"

using namespace rofp;
using fingerprint::FrequencyFingerprint;

TEST_CASE("thermal acceleration factor") {
    SUBCASE("equal temperatures give exactly one") {
        CHECK(sim::thermal_acceleration_factor({0.5, 8.62e-5, 350.0, 350.0}) == 1.0);
    }
    SUBCASE("reference stress conditions") {
        const double ft = sim::thermal_acceleration_factor({0.5, 8.62e-5, 313.0, 408.0});
        CHECK(ft > 74.0);
        CHECK(ft < 76.0);
        const double days = 6.0 * ft / 24.0;
        CHECK(days > 18.0);
        CHECK(days < 19.5);
    }
    SUBCASE("doubling the activation energy squares the factor") {
        sim::ThermalParams p{0.31, 8.62e-5, 313.0, 408.0};
        sim::ThermalParams p2 = p;
        p2.activation_energy_ev *= 2.0;
        CHECK(sim::thermal_acceleration_factor(p2) ==
              doctest::Approx(std::pow(sim::thermal_acceleration_factor(p), 2.0)).epsilon(1e-12));
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(sim::thermal_acceleration_factor({0.5, 8.62e-5, 408.0, 313.0}), ValidationError);
        CHECK_THROWS_AS(sim::thermal_acceleration_factor({-0.5, 8.62e-5, 313.0, 408.0}), ValidationError);
        CHECK_THROWS_AS(sim::thermal_acceleration_factor({0.5, 0.0, 313.0, 408.0}), ValidationError);
    }
}

TEST_CASE("aging profile") {
    CHECK(sim::aging_profile(0.0) == 0.0);
    CHECK(sim::aging_profile(6.0) == 1.0);
    CHECK(sim::aging_profile(3.0) == doctest::Approx(0.5));
    CHECK(sim::aging_profile(100.0) == 1.5);  // clip
    CHECK_THROWS_AS(sim::aging_profile(-1.0), ValidationError);
    double prev = -1.0;
    for (double t : {0.0, 0.5, 1.0, 2.0, 3.0, 6.0, 9.0, 12.0}) {
        const double v = sim::aging_profile(t);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("fresh generation degenerate cases") {
    const auto layout = testsup::small_layout(4);
    SUBCASE("no variation at all") {
        sim::VariationModel vm;
        vm.nominal_mhz = 150.0;
        vm.random_sigma = 0.0;
        vm.coeff_jitter = 0.0;
        vm.path_offsets = {2.0, -3.0};
        const auto fp = sim::generate_fresh(layout, vm, 1, "flat");
        for (int p = 0; p < 2; ++p) {
            for (int c : {0, 1, 2, 4, 5, 6}) {
                for (int r = 0; r < 4; ++r) {
                    CHECK(fp.at(p, c, r) == 150.0 + vm.path_offsets[static_cast<std::size_t>(p)]);
                }
            }
        }
    }
    SUBCASE("unit column gradient leaves constant neighbor residuals") {
        sim::VariationModel vm;
        vm.random_sigma = 0.0;
        vm.coeff_jitter = 0.0;
        vm.systematic = {1.0, 0.0, 0.0, 0.0, 0.0};  // poly = col
        const auto fp = sim::generate_fresh(layout, vm, 1, "grad");
        for (int r = 0; r < 4; ++r) {
            CHECK(fp.at(0, 0, r) - fp.at(0, 1, r) == doctest::Approx(-1.0).epsilon(1e-12));
            CHECK(fp.at(0, 4, r) - fp.at(0, 5, r) == doctest::Approx(-1.0).epsilon(1e-12));
        }
    }
    SUBCASE("path offset size must match") {
        sim::VariationModel vm;
        vm.path_offsets = {1.0, 2.0, 3.0};  // layout has 2 paths
        CHECK_THROWS_AS(sim::generate_fresh(layout, vm, 1), ValidationError);
    }
}

TEST_CASE("fresh generation is seed-deterministic") {
    const auto layout = testsup::small_layout(8);
    const auto vm = testsup::reference_variation();
    const auto a = sim::generate_fresh(layout, vm, 42, "a");
    const auto b = sim::generate_fresh(layout, vm, 42, "b");
    const auto c = sim::generate_fresh(layout, vm, 43, "c");
    bool all_equal = true;
    bool any_diff_c = false;
    for (int p = 0; p < layout.paths(); ++p) {
        for (const auto& [start, end] : layout.column_groups) {
            for (int col = start; col <= end; ++col) {
                for (int r = 0; r < layout.rows; ++r) {
                    all_equal = all_equal && (a.at(p, col, r) == b.at(p, col, r));
                    any_diff_c = any_diff_c || (a.at(p, col, r) != c.at(p, col, r));
                }
            }
        }
    }
    CHECK(all_equal);
    CHECK(any_diff_c);
}

TEST_CASE("aging application") {
    const auto layout = testsup::small_layout(10);
    sim::VariationModel vm = testsup::reference_variation();
    const auto fresh = sim::generate_fresh(layout, vm, 9, "dev");

    sim::AgingSpec spec;
    spec.region = {4, 5, 2, 6};
    spec.falloff_cols = 1.0;

    SUBCASE("zero stress is the identity") {
        spec.stress_hours = 0.0;
        const auto aged = sim::apply_aging(fresh, spec, 9);
        for (int p = 0; p < layout.paths(); ++p) {
            for (int c : {0, 1, 2, 4, 5, 6}) {
                for (int r = 0; r < layout.rows; ++r) {
                    CHECK(aged.at(p, c, r) == fresh.at(p, c, r));
                }
            }
        }
    }
    SUBCASE("six hours drops the core by exactly the configured magnitude") {
        spec.stress_hours = 6.0;
        const auto aged = sim::apply_aging(fresh, spec, 9);
        CHECK(fresh.at(0, 4, 3) - aged.at(0, 4, 3) == doctest::Approx(6.0).epsilon(1e-12));
        CHECK(fresh.at(1, 5, 6) - aged.at(1, 5, 6) == doctest::Approx(6.0).epsilon(1e-12));
    }
    SUBCASE("cells outside region and falloff are untouched") {
        spec.stress_hours = 6.0;
        const auto aged = sim::apply_aging(fresh, spec, 9);
        CHECK(aged.at(0, 0, 0) == fresh.at(0, 0, 0));
        CHECK(aged.at(1, 2, 9) == fresh.at(1, 2, 9));
        CHECK(aged.at(0, 6, 0) == fresh.at(0, 6, 0));  // distance 1 with falloff 1 -> weight 0
    }
    SUBCASE("per-cell drop is monotone in stress time") {
        double prev_drop = -1.0;
        for (double t : {0.0, 1.0, 2.0, 3.0, 6.0}) {
            spec.stress_hours = t;
            const auto aged = sim::apply_aging(fresh, spec, 9);
            double max_drop = 0.0;
            bool monotone = true;
            for (int p = 0; p < layout.paths(); ++p) {
                for (int c : {0, 1, 2, 4, 5, 6}) {
                    for (int r = 0; r < layout.rows; ++r) {
                        const double drop = fresh.at(p, c, r) - aged.at(p, c, r);
                        monotone = monotone && (drop >= 0.0);
                        max_drop = std::max(max_drop, drop);
                    }
                }
            }
            CHECK(monotone);
            CHECK(max_drop >= prev_drop);
            prev_drop = max_drop;
        }
    }
    SUBCASE("region missing the die is rejected") {
        spec.region = {40, 50, 0, 3};
        CHECK_THROWS_AS(sim::apply_aging(fresh, spec, 9), InvalidRegionError);
        spec.region = {0, 2, 50, 60};
        CHECK_THROWS_AS(sim::apply_aging(fresh, spec, 9), InvalidRegionError);
    }
}

TEST_CASE("fresh neighbor residuals are bounded by noise plus gradient") {
    auto layout = testsup::small_layout(24);
    sim::VariationModel vm = testsup::reference_variation();
    vm.coeff_jitter = 0.0;  // makes the gradient bound computable exactly

    // largest |d poly / d col| over the populated columns
    double max_gradient = 0.0;
    for (const auto& [start, end] : layout.column_groups) {
        for (int c = start; c < end; ++c) {
            for (int r = 0; r < layout.rows; ++r) {
                max_gradient = std::max(max_gradient,
                                        std::abs(vm.systematic.eval(c + 1, r) - vm.systematic.eval(c, r)));
            }
        }
    }

    std::vector<double> mean_abs_residuals;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto fp = sim::generate_fresh(layout, vm, seed, "b");
        for (const auto& [left, right] : fingerprint::adjacent_pairs(layout)) {
            double acc = 0.0;
            std::size_t count = 0;
            for (int p = 0; p < layout.paths(); ++p) {
                for (int r = 0; r < layout.rows; ++r) {
                    acc += std::abs(fp.at(p, left, r) - fp.at(p, right, r));
                    ++count;
                }
            }
            mean_abs_residuals.push_back(acc / static_cast<double>(count));
        }
    }
    std::sort(mean_abs_residuals.begin(), mean_abs_residuals.end());
    const double p99 = mean_abs_residuals[static_cast<std::size_t>(
        0.99 * static_cast<double>(mean_abs_residuals.size() - 1))];
    CHECK(p99 <= 2.0 * vm.random_sigma + max_gradient);
}
