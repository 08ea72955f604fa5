#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "fmcf/errors.hpp"
#include "fmcf/oracles.hpp"

using namespace fmcf;

TEST_SUITE("oracles") {

TEST_CASE("radial_solution examples") {
    CHECK(radial_solution(1, 2.0, 0.0, 1.5) == doctest::Approx(1.0));
    CHECK(radial_solution(1, 1.0, 1.0, 0.7) == doctest::Approx(1.0));
    CHECK(radial_solution(2, 2.0, 0.0, 0.5) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("radial_harnack examples") {
    CHECK(radial_harnack(1, 1.0, 0.0, 0.0) == doctest::Approx(1.0));
    CHECK(radial_harnack(1, 1.0, 1.0, 0.3) == doctest::Approx(0.0));
    CHECK(radial_harnack(1, 1.0, -1.0, 0.0) == doctest::Approx(0.0));
    // expanding branch: R0 = 2, c = 1 gives H_f < 0 and dt H_f < 0
    CHECK(radial_harnack(1, 2.0, 1.0, 0.0) < 0.0);
}

TEST_CASE("frozen values from high-precision ODE integration") {
    struct Row {
        int n;
        double R0, c, t, R, dtHf;
    };
    const Row rows[] = {
        {1, 1.5, -0.5, 0.4, 0.92133609266731050218, 1.0482984973436335704},
        {1, 2.0, 0.5, 0.7, 2.4550978422337780354, -0.54619828861860573522},
        {2, 1.3, 0.25, 0.2, 1.0130999491376275735, 3.7835122840751715207},
        {1, 0.8, 1.0, 0.1, 0.74852856128696848924, 1.6358481506105099318},
    };
    for (const auto& r : rows) {
        CHECK(radial_solution(r.n, r.R0, r.c, r.t) == doctest::Approx(r.R).epsilon(1e-13));
        CHECK(radial_harnack(r.n, r.R0, r.c, r.t) == doctest::Approx(r.dtHf).epsilon(1e-11));
    }
}

TEST_CASE("radial solution satisfies its ODE") {
    for (double c : {-0.5, 0.0, 0.5, 1.0}) {
        const RadialSolution sol{1, 1.2, c};
        const double horizon = sol.extinction_time().value_or(1.0) * 0.9;
        for (int k = 1; k <= 100; ++k) {
            const double t = horizon * k / 101.0;
            const double h = 1e-3;
            const double d = (-sol.radius_squared(t + 2 * h) + 8 * sol.radius_squared(t + h) -
                              8 * sol.radius_squared(t - h) + sol.radius_squared(t - 2 * h)) /
                             (12 * h);
            CHECK(std::abs(d + 2.0 * (1.0 - c * sol.radius_squared(t))) < 1e-9);
        }
    }
}

TEST_CASE("extinction and domain errors") {
    const RadialSolution sol{1, 1.0, 0.0};
    CHECK(*sol.extinction_time() == doctest::Approx(0.5));
    CHECK_THROWS_AS(sol.radius(0.6), DomainError);
    try {
        sol.radius(0.5);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(e.extinction_time() == doctest::Approx(0.5));
    }
    CHECK_FALSE(RadialSolution{1, 2.0, 1.0}.extinction_time().has_value());
    CHECK(RadialSolution{1, 1.0, 1.0}.kind() == RadialSolution::Kind::stationary);
    CHECK_THROWS_AS(radial_solution(0, 1.0, 0.0, 0.0), InputError);
    CHECK_THROWS_AS(radial_solution(1, -1.0, 0.0, 0.0), InputError);
}

TEST_CASE("convergence_order examples") {
    std::vector<std::pair<double, double>> e{{64, 1e-2}, {128, 2.5e-3}, {256, 6.25e-4}};
    const auto o = convergence_order(e);
    CHECK(o.order == doctest::Approx(2.0));
    CHECK(o.monotone);
    std::vector<std::pair<double, double>> two{{64, 1e-2}, {128, 2.5e-3}};
    CHECK_THROWS_AS(convergence_order(two), InputError);
    std::vector<std::pair<double, double>> noisy{{64, 1e-2}, {128, 2e-2}, {256, 1e-3}};
    CHECK_FALSE(convergence_order(noisy).monotone);
    std::vector<std::pair<double, double>> unsorted{{128, 1e-2}, {64, 2e-2}, {256, 1e-3}};
    CHECK_THROWS_AS(convergence_order(unsorted), InputError);
    std::vector<std::pair<double, double>> steps{{1e-2, 1e-4}, {5e-3, 2.5e-5}, {2.5e-3, 6.25e-6}};
    CHECK(convergence_order(steps, true).order == doctest::Approx(2.0));
}

TEST_CASE("oracle table csv") {
    const auto csv = oracle_table_csv({{0.0, 1.0, 1.0, 0.0}, {0.5, 0.1, 0.30000000000000004, 0.2}});
    CHECK(csv == "t,R_exact,R_sim,abs_err\n0,1,1,0\n0.5,0.1,0.30000000000000004,0.2\n");
}

}  // TEST_SUITE
