#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "test_support.hpp"

using namespace rofp;
using fingerprint::FrequencyFingerprint;

namespace {

detector::ComparisonResult fake_comparison(Rng& rng, int path, int col) {
    detector::ComparisonResult c;
    c.path = path;
    c.col_left = col;
    c.col_right = col + 1;
    for (int i = 0; i < 5; ++i) {
        c.forward.scores.push_back(rng.uniform(-2.0, 25.0));
        c.forward.origins.push_back(ulsif::SampleOrigin::inlier);
        c.backward.scores.push_back(rng.uniform(-2.0, 25.0));
        c.backward.origins.push_back(ulsif::SampleOrigin::test);
    }
    c.max_score = std::max(*std::max_element(c.forward.scores.begin(), c.forward.scores.end()),
                           *std::max_element(c.backward.scores.begin(), c.backward.scores.end()));
    return c;
}

} // namespace

TEST_CASE("identical columns score near zero") {
    auto layout = testsup::small_layout(12);
    FrequencyFingerprint fp("copy", layout);
    Rng rng(4);
    for (int p = 0; p < layout.paths(); ++p) {
        for (const auto& [start, end] : layout.column_groups) {
            for (int r = 0; r < layout.rows; ++r) {
                const double v = 200.0 + rng.normal(0.0, 0.3);
                for (int c = start; c <= end; ++c) fp.set(p, c, r, v);  // all columns equal
            }
        }
    }
    const auto result = detector::score_pair(fp, 0, {0, 1});
    CHECK(std::abs(result.max_score) < 0.5);
    CHECK(result.forward.scores.size() == 24);  // both columns scored
    CHECK(result.backward.scores.size() == 24);
}

TEST_CASE("score_device covers every path and pair exactly once") {
    auto layout = testsup::small_layout(8);
    const auto fp = sim::generate_fresh(layout, testsup::reference_variation(), 17, "dev");
    const auto score = detector::score_device(fp, {}, 2);
    CHECK(score.device_id == "dev");
    CHECK(score.comparisons.size() == 8);  // 2 paths x 4 pairs
    CHECK(score.path_max.size() == 2);

    // the reference device shape yields 32 x 10 comparisons
    const auto ref = testsup::reference_layout();
    CHECK(fingerprint::adjacent_pairs(ref).size() * static_cast<std::size_t>(ref.paths()) == 320);
}

TEST_CASE("aggregation is consistent and order-independent") {
    Rng rng(88);
    for (int trial = 0; trial < 100; ++trial) {
        const int paths = 2 + static_cast<int>(rng.below(4));
        std::vector<detector::ComparisonResult> comparisons;
        for (int p = 0; p < paths; ++p) {
            const int pairs = 1 + static_cast<int>(rng.below(4));
            for (int q = 0; q < pairs; ++q) comparisons.push_back(fake_comparison(rng, p, q));
        }
        const auto a = detector::aggregate_device("d", paths, comparisons);

        double want_stat = -std::numeric_limits<double>::infinity();
        for (const auto& c : comparisons) want_stat = std::max(want_stat, c.max_score);
        CHECK(a.statistic == want_stat);
        for (const auto& c : comparisons) {
            CHECK(a.path_max[static_cast<std::size_t>(c.path)] >= c.max_score);
        }
        CHECK(*std::max_element(a.path_max.begin(), a.path_max.end()) == a.statistic);

        // permuting the comparison order changes nothing
        auto shuffled = comparisons;
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
        }
        const auto b = detector::aggregate_device("d", paths, shuffled);
        CHECK(b.statistic == a.statistic);
        CHECK(b.path_max == a.path_max);
    }
}

TEST_CASE("thread count does not change the result") {
    auto layout = testsup::small_layout(10);
    const auto fp = sim::generate_fresh(layout, testsup::reference_variation(), 5, "dev");
    const auto seq = detector::score_device(fp, {}, 1);
    const auto par = detector::score_device(fp, {}, 2);
    CHECK(seq.statistic == par.statistic);
    CHECK(seq.path_max == par.path_max);
}

TEST_CASE("classification uses a strict threshold") {
    std::vector<detector::DeviceScore> scores(2);
    scores[0].device_id = "a";
    scores[0].statistic = 25.0;
    scores[1].device_id = "b";
    scores[1].statistic = 15.0;
    const auto verdicts = detector::classify(scores, 15.0);
    REQUIRE(verdicts.size() == 2);
    CHECK(verdicts[0].recycled);
    CHECK_FALSE(verdicts[1].recycled);  // equal is fresh
    CHECK(verdicts[1].threshold == 15.0);
    CHECK_THROWS_AS(detector::classify(scores, std::nan("")), ValidationError);
}

TEST_CASE("adding a constant to every frequency leaves verdicts unchanged") {
    auto layout = testsup::small_layout(12);
    const auto fp = sim::generate_fresh(layout, testsup::reference_variation(), 31, "dev");
    FrequencyFingerprint shifted = fp;
    for (int p = 0; p < layout.paths(); ++p) {
        for (const auto& [start, end] : layout.column_groups) {
            for (int c = start; c <= end; ++c) {
                for (int r = 0; r < layout.rows; ++r) shifted.set(p, c, r, fp.at(p, c, r) + 500.0);
            }
        }
    }
    const auto a = detector::score_device(fp, {}, 2);
    const auto b = detector::score_device(shifted, {}, 2);
    CHECK(b.statistic == doctest::Approx(a.statistic).epsilon(1e-6));
    for (double threshold : {0.5, 2.0, 5.0, 20.0}) {
        const auto va = detector::classify({a}, threshold);
        const auto vb = detector::classify({b}, threshold);
        CHECK(va[0].recycled == vb[0].recycled);
    }
}

TEST_CASE("reference-scale band behavior on one column group") {
    fingerprint::DeviceLayout layout;
    layout.rows = 94;
    layout.column_groups = {{11, 13}};
    layout.lut_inputs = 2;  // two paths keeps this fast
    layout.ro_stages = 15;
    const auto vm = testsup::reference_variation();

    const auto fresh = sim::generate_fresh(layout, vm, 1001, "fresh");
    const auto fresh_score = detector::score_device(fresh, {}, 2);
    CHECK(fresh_score.statistic < 10.0);

    sim::AgingSpec spec;
    spec.region = {12, 13, 70, 74};
    spec.stress_hours = 6.0;
    const auto aged = sim::apply_aging(fresh, spec, 1001);
    const auto edge = detector::score_pair(aged, 0, {11, 12});
    CHECK(edge.max_score > 20.0);

    const auto aged_score = detector::score_device(aged, {}, 2);
    CHECK(aged_score.statistic > 20.0);
    CHECK(aged_score.statistic > fresh_score.statistic);
}

TEST_CASE("device statistic is nondecreasing in stress time") {
    // Fixed-seed sweep: an untouched column group pins the fresh noise floor
    // while the aged corner sweeps through the detectable regime.
    fingerprint::DeviceLayout layout;
    layout.rows = 94;
    layout.column_groups = {{0, 2}, {11, 13}};
    layout.lut_inputs = 6;
    const auto fresh = sim::generate_fresh(layout, testsup::reference_variation(), 777, "dev");

    sim::AgingSpec spec;
    spec.region = {12, 13, 70, 74};
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : {0.0, 1.0, 2.0, 3.0, 6.0}) {
        spec.stress_hours = t;
        const auto aged = sim::apply_aging(fresh, spec, 777);
        const auto score = detector::score_device(aged, {}, 2);
        CHECK(score.statistic >= prev);
        prev = score.statistic;
    }
}

TEST_CASE("zero-variation device classifies fresh at any positive threshold") {
    auto layout = testsup::small_layout(8);
    sim::VariationModel vm;
    vm.nominal_mhz = 100.0;
    vm.random_sigma = 0.0;
    vm.coeff_jitter = 0.0;
    const auto fp = sim::generate_fresh(layout, vm, 0, "flat");
    const auto score = detector::score_device(fp, {}, 2);
    CHECK(std::abs(score.statistic) < 0.5);
    CHECK_FALSE(detector::classify({score}, 1.0)[0].recycled);
}
