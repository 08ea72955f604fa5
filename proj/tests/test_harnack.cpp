#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fmcf/curve.hpp"
#include "fmcf/errors.hpp"
#include "fmcf/flow.hpp"
#include "fmcf/harnack.hpp"
#include "fmcf/oracles.hpp"

using namespace fmcf;
using std::numbers::pi;

namespace {

FlowTrace fixed_run(const DiscreteCurve& c, const Weight& w, double dt, double t_end, int record_every = 1) {
    FlowConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.record_every = record_every;
    return run(c, w, cfg);
}

FlowTrace auto_run(const DiscreteCurve& c, const Weight& w, double t_end, int record_every = 1) {
    FlowConfig cfg;
    cfg.t_end = t_end;
    cfg.record_every = record_every;
    return run(c, w, cfg);
}

}  // namespace

TEST_SUITE("harnack") {

TEST_CASE("harnack_min examples") {
    auto s = harnack_min(3.0, 0.0, 2.0);
    CHECK(s.z_min == 3.0);
    CHECK(s.v_star == 0.0);
    CHECK(s.strictly_convex);
    s = harnack_min(1.0, 1.0, 1.0);
    CHECK(s.z_min == doctest::Approx(0.0));
    CHECK(s.v_star == doctest::Approx(-1.0));
}

TEST_CASE("zero gradient: minimizer at V = 0") {
    const auto s = harnack_min(-0.4, 0.0, 0.7);
    CHECK(s.v_star == 0.0);
    CHECK(s.z_min == harnack_quantity(-0.4, 0.0, 0.7, 0.0));
}

TEST_CASE("non-strictly-convex nodes fall back to the scan") {
    auto s = harnack_min(2.0, 0.0, 0.0);
    CHECK_FALSE(s.strictly_convex);
    CHECK(s.z_min == doctest::Approx(2.0));
    s = harnack_min(1.0, 0.5, -1.0);
    CHECK_FALSE(s.strictly_convex);
    // concave in V: the scan minimum sits at an end of the window
    CHECK(std::abs(s.v_star) == doctest::Approx(10.0 * (1.0 + 0.5)));
    CHECK(s.z_min < 1.0);
}

TEST_CASE("property: Z(V) >= z_min and the local scan agrees") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::uniform_real_distribution<double> uh(0.01, 5.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double d = u(rng), g = u(rng), h = uh(rng);
        const auto s = harnack_min(d, g, h);
        for (int k = 0; k < 20; ++k) {
            const double v = 10.0 * u(rng);
            CHECK(harnack_quantity(d, g, h, v) >= s.z_min - 1e-12 * (1.0 + std::abs(s.z_min) + std::abs(v * v * h)));
        }
        double scan = std::numeric_limits<double>::infinity();
        for (int k = 0; k < kScanPoints; ++k) {
            const double v = s.v_star - 1.0 + 2.0 * k / (kScanPoints - 1);
            scan = std::min(scan, harnack_quantity(d, g, h, v));
        }
        CHECK(scan - s.z_min < 1e-6 * (1.0 + std::abs(s.z_min)));
        CHECK(scan - s.z_min >= -1e-12 * (1.0 + std::abs(s.z_min)));
    }
}

TEST_CASE("shrinking unit circle: dt H = 1 at R = 1") {
    const auto trace = fixed_run(make_circle(1.0, 128), WeightField2::constant(), 1e-4, 1e-3);
    const auto dt0 = snapshot_dt_H_f(trace, 0);
    for (double d : dt0) CHECK(std::abs(d - 1.0) < 1e-3);
    const auto& g = trace.snapshots[0].geometry;
    CHECK(harnack_quantity(g, dt0, 5, 0.0) == dt0[5]);
}

TEST_CASE("circle: z_min = 1/R^3 at every node") {
    const auto trace = fixed_run(make_circle(1.3, 128), WeightField2::constant(), 1e-4, 1e-3);
    const auto dt = snapshot_dt_H_f(trace, 5);
    const double R = mean_radius(trace.snapshots[5].curve);
    for (std::size_t i = 0; i < 128; ++i) {
        const auto s = harnack_min(trace.snapshots[5].geometry, dt, i);
        CHECK(std::abs(s.z_min - 1.0 / (R * R * R)) < 1e-3);
        CHECK(std::abs(s.v_star) < 1e-6);
    }
}

TEST_CASE("2:1 ellipse at t = 0.05: Z(1) matches the direct quadratic") {
    const auto trace = fixed_run(make_ellipse(2.0, 1.0, 128), WeightField2::constant(), 1e-4, 0.06, 10);
    const auto k = trace.find_time(0.05);
    REQUIRE(k.has_value());
    const auto dt = snapshot_dt_H_f(trace, *k);
    const auto& g = trace.snapshots[*k].geometry;
    const double direct = dt[0] + 2.0 * g.dH_f_ds[0] + g.H[0];
    CHECK(std::abs(harnack_quantity(g, dt, 0, 1.0) - direct) < 1e-9);
    const auto s = harnack_min(g, dt, 0);
    CHECK(harnack_quantity(g, dt, 0, 1.0) >= s.z_min);
}

TEST_CASE("2:1 ellipse, f = 0: initial values against the closed form") {
    // kappa_ss + kappa^3 and kappa_s for x = 2 cos t, y = sin t (symbolic differentiation)
    const auto trace = fixed_run(make_ellipse(2.0, 1.0, 256), WeightField2::constant(), 2e-6, 2e-5);
    const auto dt = snapshot_dt_H_f(trace, 0);
    const auto& g = trace.snapshots[0].geometry;
    CHECK(dt[0] == doctest::Approx(-10.0).epsilon(1e-2));
    CHECK(dt[64] == doctest::Approx(0.15625).epsilon(1e-2));
    CHECK(dt[32] == doctest::Approx(1.4409866841855270940).epsilon(1e-2));
    CHECK(g.H[32] == doctest::Approx(0.50596442562694069312).epsilon(1e-3));
    CHECK(g.dH_f_ds[32] == doctest::Approx(-0.576).epsilon(1e-3));
    CHECK(harnack_min(g, dt, 32).z_min == doctest::Approx(0.78525678857301195572).epsilon(2e-2));
}

TEST_CASE("verify: shrinking circle, plain and hamilton_2t") {
    const auto trace = fixed_run(make_circle(std::sqrt(2.0), 128), WeightField2::constant(), 1e-3, 0.6, 10);
    const auto plain = verify_differential_harnack(trace, WeightField2::constant(), HarnackVariant::plain);
    CHECK_FALSE(plain.vacuous);
    CHECK(plain.passed());
    CHECK(plain.global_min > 0.0);
    CHECK(plain.violations.empty());
    for (std::size_t k = 1; k < plain.per_time.size(); ++k) CHECK(plain.per_time[k].global_min > plain.per_time[k - 1].global_min);
    const double R = RadialSolution{1, std::sqrt(2.0), 0.0}.radius(plain.per_time.front().t);
    CHECK(plain.per_time.front().global_min == doctest::Approx(1.0 / (R * R * R)).epsilon(1e-3));

    const auto ham = verify_differential_harnack(trace, WeightField2::constant(), HarnackVariant::hamilton_2t);
    CHECK(ham.passed());
    bool seen = false;
    for (const auto& s : ham.samples) {
        if (std::abs(s.t - 0.5) < 1e-12) {
            seen = true;
            CHECK(std::abs(s.value() - 2.0) <= 2e-3);
        }
    }
    CHECK(seen);
}

TEST_CASE("verify: expanding circle is vacuous") {
    const auto trace = auto_run(make_circle(2.0, 128), WeightField2::isotropic(1.0), 0.2);
    const auto r = verify_differential_harnack(trace, WeightField2::isotropic(1.0), HarnackVariant::plain);
    CHECK_FALSE(r.flags.initial_Z_nonneg);
    CHECK(r.flags.weakly_convex_initial);
    CHECK(r.vacuous);
    CHECK_FALSE(r.violations.empty());
    CHECK(r.passed());
}

TEST_CASE("verify: general_c needs a positive table") {
    const auto trace = auto_run(make_circle(1.0, 64), WeightField2::constant(), 0.05);
    CHECK_THROWS_AS(verify_differential_harnack(trace, WeightField2::constant(), HarnackVariant::general_c), ConfigError);
    CHECK_THROWS_AS(TimeTable({{0.0, 1.0}, {1.0, -1.0}}), ConfigError);
    const TimeTable c({{0.0, 1.0}, {1.0, 3.0}});
    CHECK(c(0.5) == doctest::Approx(2.0));
    CHECK(c(-1.0) == 1.0);
    CHECK(c(5.0) == 3.0);
    const auto r = verify_differential_harnack(trace, WeightField2::constant(), HarnackVariant::general_c, c);
    CHECK(r.passed());
    CHECK(r.global_min > 0.0);
}

TEST_CASE("verify: exploratory weights are vacuous") {
    const Weight w = Weight::exploratory([](const Vec2& x) { return 0.05 * std::pow(x.x(), 3); });
    const auto trace = auto_run(make_circle(1.0, 64), w, 0.05);
    const auto r = verify_differential_harnack(trace, w, HarnackVariant::plain);
    CHECK_FALSE(r.flags.third_derivative_zero);
    CHECK(r.vacuous);
}

TEST_CASE("verify: redistributed traces are rejected") {
    FlowConfig cfg;
    cfg.t_end = 0.05;
    cfg.redistribution = Redistribution::tangential_uniform;
    const auto trace = run(make_circle(1.0, 64), WeightField2::constant(), cfg);
    CHECK_THROWS_AS(verify_differential_harnack(trace, WeightField2::constant(), HarnackVariant::plain), InputError);
    const std::vector<IntegralPair> pairs{{0, 0.0, 0, 0.05}};
    CHECK_THROWS_AS(verify_integral_harnack(trace, WeightField2::constant(), pairs, 1.0, true), InputError);
}

TEST_CASE("tolerance formula") {
    const auto trace = fixed_run(make_circle(1.0, 64), WeightField2::constant(), 1e-3, 0.01);
    CHECK(harnack_tolerance(trace, 0.5) == doctest::Approx(0.05 * (1.0 / 4096.0 + 1e-3)));
    CHECK(harnack_tolerance(trace, 4.0, 2.0) == doctest::Approx(2.0 * 0.05 * 4.0 * (1.0 / 4096.0 + 1e-3)));
}

TEST_CASE("integral: same-node pairs on a shrinking circle") {
    const auto trace = fixed_run(make_circle(1.0, 128), WeightField2::constant(), 2.5e-4, 0.3, 40);
    std::vector<IntegralPair> pairs;
    for (std::size_t k = 1; k + 1 < trace.snapshots.size(); k += 5) {
        pairs.push_back({3, trace.snapshots[k].curve.time, 3, trace.snapshots.back().curve.time});
    }
    const auto checks = verify_integral_harnack(trace, WeightField2::constant(), pairs, 1.0, true);
    for (const auto& c : checks) {
        CHECK(c.delta_bound == 0.0);
        const double r1 = RadialSolution{1, 1.0, 0.0}.radius(c.pair.t1);
        const double r2 = RadialSolution{1, 1.0, 0.0}.radius(c.pair.t2);
        CHECK(c.lhs == doctest::Approx(std::log(r1 / r2)).epsilon(1e-6));
        CHECK(c.margin > 0.0);
        CHECK(c.passed);
    }
}

TEST_CASE("integral: antipodal nodes on a circle with A = I") {
    const auto trace = fixed_run(make_circle(0.8, 128), WeightField2::isotropic(1.0), 2.5e-4, 0.35, 20);
    const auto pinch = pinch_monitor(trace, WeightField2::isotropic(1.0));
    REQUIRE(pinch.hypotheses_met);
    const std::vector<IntegralPair> pairs{{0, 0.1, 64, 0.35}};
    const auto checks =
        verify_integral_harnack(trace, WeightField2::isotropic(1.0), pairs, std::sqrt(pinch.C_squared), true);
    REQUIRE(checks.size() == 1);
    const auto& c = checks[0];
    CHECK(std::abs(c.lhs - std::log(RadialSolution{1, 0.8, 1.0}.H_f(0.35) / RadialSolution{1, 0.8, 1.0}.H_f(0.1))) < 1e-4);
    CHECK(c.rhs < 0.0);
    CHECK(c.delta_bound == doctest::Approx(std::pow(pi * RadialSolution{1, 0.8, 1.0}.radius(0.1), 2) / 0.25).epsilon(1e-3));
    CHECK(c.passed);
    CHECK_FALSE(c.vacuous);
}

TEST_CASE("integral: input errors") {
    const auto trace = fixed_run(make_circle(1.0, 64), WeightField2::constant(), 1e-3, 0.01);
    std::vector<IntegralPair> same_time{{0, 0.005, 1, 0.005}};
    CHECK_THROWS_AS(verify_integral_harnack(trace, WeightField2::constant(), same_time, 1.0, true), InputError);
    std::vector<IntegralPair> off_grid{{0, 0.0051, 1, 0.008}};
    CHECK_THROWS_AS(verify_integral_harnack(trace, WeightField2::constant(), off_grid, 1.0, true), InputError);
    std::vector<IntegralPair> bad_id{{0, 0.002, 999, 0.008}};
    CHECK_THROWS_AS(verify_integral_harnack(trace, WeightField2::constant(), bad_id, 1.0, true), InputError);
}

TEST_CASE("integral: sampled pairs are reproducible") {
    const auto trace = fixed_run(make_circle(1.0, 64), WeightField2::constant(), 1e-3, 0.02);
    const auto a = sample_integral_pairs(trace, 30, 9);
    const auto b = sample_integral_pairs(trace, 30, 9);
    REQUIRE(a.size() == 30);
    for (std::size_t m = 0; m < a.size(); ++m) {
        CHECK(a[m].node_id_1 == b[m].node_id_1);
        CHECK(a[m].t1 == b[m].t1);
        CHECK(a[m].t2 > a[m].t1);
        CHECK(a[m].t1 > 0.0);
        if (m % 2 == 0) CHECK(a[m].node_id_1 == a[m].node_id_2);
    }
}

TEST_CASE("serialization") {
    const auto trace = fixed_run(make_circle(1.0, 64), WeightField2::constant(), 1e-3, 0.01);
    const auto r = verify_differential_harnack(trace, WeightField2::constant(), HarnackVariant::plain);
    const auto j = to_json(r);
    CHECK(j.at("variant") == "plain");
    CHECK(j.contains("global_min"));
    CHECK(j.contains("vacuous"));
    const auto csv = harnack_summary_csv(r);
    CHECK(csv.rfind("t,global_min_at_t,violations_at_t\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.per_time.size()) + 1);
    CHECK(harnack_variant_from_string("hamilton_2t") == HarnackVariant::hamilton_2t);
    CHECK_THROWS_AS(harnack_variant_from_string("li_yau"), ConfigError);
}

}  // TEST_SUITE
