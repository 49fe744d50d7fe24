#include <doctest.h>

#include <cmath>
#include <limits>
#include <thread>

#include "avgdiff/dynamics.hpp"
#include "avgdiff/genetics.hpp"
#include "test_util.hpp"

using namespace avgdiff;
using namespace testutil;

namespace {

TimeField zero_field(double radius = 2.0) {
    return field_from_spec(scalar_spec(radius, {}));
}

TimeField one_field(double radius = 2.0) {
    return field_from_spec(scalar_spec(radius, {term(1.0, {0}, TimeFactorSpec::constant())}));
}

}  // namespace

TEST_CASE("iterate reproduces forced recursions") {
    SUBCASE("zero field is constant") {
        const Trajectory t = iterate(zero_field(), ScaleMode::unit(), 3, {0.4}, 10);
        REQUIRE(t.states.size() == 11);
        for (const Vec& s : t.states) CHECK(s[0] == 0.4);
        CHECK(!t.exited);
    }
    SUBCASE("unit counting") {
        const Trajectory t = iterate(one_field(10.0), ScaleMode::unit(), 0, {0.0}, 5);
        REQUIRE(t.states.size() == 6);
        for (std::size_t j = 0; j < t.states.size(); ++j)
            CHECK(t.states[j][0] == static_cast<double>(j));
    }
    SUBCASE("one_over_n partial harmonic sums") {
        const Trajectory t = iterate(one_field(10.0), ScaleMode::one_over_n(), 1, {0.0}, 3);
        REQUIRE(t.states.size() == 4);
        CHECK(t.states[0][0] == 0.0);
        CHECK(t.states[1][0] == 1.0);
        CHECK(t.states[2][0] == 1.5);
        CHECK(t.states[3][0] == 1.5 + 1.0 / 3.0);
    }
}

TEST_CASE("iterate preconditions and failure modes") {
    CHECK_THROWS_AS(iterate(one_field(), ScaleMode::one_over_n(), 0, {0.0}, 3), PreconditionError);
    CHECK_THROWS_AS(iterate(one_field(), ScaleMode::unit(), 0, {3.0}, 3), DomainError);

    SUBCASE("domain exit is recorded, not thrown") {
        const Trajectory t = iterate(one_field(1.0), ScaleMode::unit(), 0, {0.95}, 10);
        REQUIRE(t.exited.has_value());
        CHECK(*t.exited == 1);
        CHECK(t.states.size() == 2);  // truncated at the exiting state
        CHECK(t.states.back()[0] == doctest::Approx(1.95));
    }
    SUBCASE("non-finite states raise NumericError with the step index") {
        TimeField f;
        f.domain = Domain{1, 2.0};
        f.eval = [](Index n, const Vec&) {
            return Vec{n >= 2 ? std::numeric_limits<double>::infinity() : 0.0};
        };
        try {
            iterate(f, ScaleMode::unit(), 0, {0.0}, 10);
            FAIL("expected NumericError");
        } catch (const NumericError& e) {
            CHECK(e.step() == 3);
        }
    }
}

TEST_CASE("trajectory steps recompute bit-identically") {
    SplitMix64 rng(101);
    const TimeField f = field_from_spec(random_spec(rng, 2, 1.5, 0.1));
    const ScaleMode scale = ScaleMode::eps(0.3);
    const Trajectory t = iterate(f, scale, 2, {0.2, -0.1}, 50);
    REQUIRE(!t.exited);
    for (std::size_t j = 0; j + 1 < t.states.size(); ++j)
        CHECK(bit_equal(advance_state(f, scale, t.time_of(j), t.states[j]), t.states[j + 1]));
}

TEST_CASE("iterate satisfies the semigroup property bit-identically") {
    SplitMix64 rng(103);
    const TimeField f = field_from_spec(random_spec(rng, 2, 1.5, 0.1));
    const ScaleMode scale = ScaleMode::eps(0.2);
    const Trajectory whole = iterate(f, scale, 0, {0.3, 0.1}, 40);
    REQUIRE(!whole.exited);
    const Trajectory first = iterate(f, scale, 0, {0.3, 0.1}, 15);
    const Trajectory second = iterate(f, scale, 15, first.states.back(), 25);
    for (std::size_t j = 0; j <= 25; ++j)
        CHECK(bit_equal(second.states[j], whole.states[15 + j]));
}

TEST_CASE("period_map agrees with iterate and rejects bad inputs") {
    SUBCASE("zero field is the identity") {
        const Vec x{0.7};
        CHECK(period_map(zero_field(), ScaleMode::unit(), 0, x, 3) == x);
    }
    SUBCASE("linear contraction squares the factor") {
        const TimeField f = field_from_spec(linear_spec(-1.0, 2.0));
        const Vec out = period_map(f, ScaleMode::eps(0.5), 0, {0.8}, 2);
        CHECK(out[0] == doctest::Approx(0.25 * 0.8).epsilon(1e-15));
    }
    SUBCASE("selection map: period_map equals the last state of iterate") {
        const SelectionParams params = SelectionParams::make(0.01, {0.5, 1.5}, {3.5, 2.5});
        const TimeField f = selection_field(params);
        const Vec via_map = period_map(f, ScaleMode::unit(), 0, {0.6}, 2);
        const Trajectory t = iterate(f, ScaleMode::unit(), 0, {0.6}, 2);
        CHECK(bit_equal(via_map, t.states.back()));
    }
    SUBCASE("one_over_n has no stroboscopic map") {
        CHECK_THROWS_AS(period_map(zero_field(), ScaleMode::one_over_n(), 1, {0.0}, 2),
                        UnsupportedScaleError);
    }
    SUBCASE("declared period must divide l") {
        const TimeField f = field_from_spec(stock_spec());  // period 2
        CHECK_THROWS_AS(period_map(f, ScaleMode::eps(0.1), 0, {0.0}, 3), PreconditionError);
        CHECK_NOTHROW(period_map(f, ScaleMode::eps(0.1), 0, {0.0}, 4));
    }
}

TEST_CASE("find_periodic_orbit locates known orbits") {
    SUBCASE("autonomous fixed point is periodic for any l") {
        const TimeField f = field_from_spec(
            scalar_spec(2.0, {term(-1.0, {1}, TimeFactorSpec::constant()),
                              term(1.0, {0}, TimeFactorSpec::constant())}));
        const PeriodicOrbit orbit = find_periodic_orbit(f, ScaleMode::eps(0.2), 3, {0.3}, 1e-12);
        CHECK(orbit.residual <= 1e-12);
        for (const Vec& s : orbit.states) CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("alternating forcing: affine fixed-point oracle") {
        // x' = c x + eps (-1)^n with c = 1 - eps; the two-step composition is
        // affine and solvable by hand: x* = -eps / (1 + c).
        const double eps = 0.1;
        const double c = 1.0 - eps;
        const TimeField f = field_from_spec(stock_spec());
        const PeriodicOrbit orbit = find_periodic_orbit(f, ScaleMode::eps(eps), 2, {0.0}, 1e-13);
        const double expected0 = -eps / (1.0 + c);
        const double expected1 = c * expected0 + eps;
        CHECK(orbit.states[0][0] == doctest::Approx(expected0).epsilon(1e-10));
        CHECK(orbit.states[1][0] == doctest::Approx(expected1).epsilon(1e-10));
        CHECK(orbit.residual <= 1e-13);

        // orbit verification: l exact steps from states[0] return within residual
        const Vec back = period_map(f, ScaleMode::eps(eps), 0, orbit.states[0], 2);
        CHECK(sup_dist(back, orbit.states[0]) <= orbit.residual);
    }
    SUBCASE("selection orbit agrees with the long-run iteration oracle") {
        const SelectionParams params = SelectionParams::make(0.01, {0.5, 1.5}, {3.5, 2.5});
        const TimeField f = selection_field(params);
        const PeriodicOrbit orbit = find_periodic_orbit(f, ScaleMode::unit(), 2, {0.75}, 1e-12);
        const Trajectory long_run = iterate(f, ScaleMode::unit(), 0, {0.6}, 100000);
        REQUIRE(!long_run.exited);
        const Vec tail = long_run.states[100000];  // even index, phase 0
        CHECK(orbit.states[0][0] == doctest::Approx(tail[0]).epsilon(1e-8));
        CHECK(std::abs(orbit.states[0][0] - 0.75) < 0.05);
        CHECK(std::abs(orbit.states[1][0] - 0.75) < 0.05);
    }
}

TEST_CASE("find_periodic_orbit failure modes") {
    SUBCASE("constant drift has a singular Newton system") {
        CHECK_THROWS_AS(find_periodic_orbit(one_field(), ScaleMode::unit(), 1, {0.0}, 1e-12),
                        SingularityError);
    }
    SUBCASE("iteration budget exhaustion reports the last residual") {
        const SelectionParams params = SelectionParams::make(0.01, {0.5, 1.5}, {3.5, 2.5});
        const TimeField f = selection_field(params);
        OrbitSolveOptions opt;
        opt.max_iters = 2;  // far too few from a distant guess
        try {
            find_periodic_orbit(f, ScaleMode::unit(), 2, {0.2}, 1e-30, opt);
            FAIL("expected NonConvergenceError");
        } catch (const NonConvergenceError& e) {
            CHECK(e.last_residual() > 0.0);
            CHECK(e.last_residual() < 1.0);
        }
    }
}

TEST_CASE("orbit multipliers classify stability") {
    SUBCASE("linear contraction has multiplier 1 - eps") {
        const TimeField f = field_from_spec(linear_spec(-1.0, 2.0));
        const PeriodicOrbit orbit = find_periodic_orbit(f, ScaleMode::eps(0.1), 1, {0.0}, 1e-14);
        REQUIRE(orbit.multipliers.size() == 1);
        CHECK(orbit.multipliers[0] == doctest::Approx(0.9).epsilon(1e-9));
        CHECK(orbit_is_stable(orbit));
        CHECK(orbit_multipliers(orbit) == orbit.multipliers);
    }
    SUBCASE("averaged selection multiplier matches the analytic derivative") {
        const SelectionParams params = SelectionParams::make(0.01, {1.0}, {3.0});
        const TimeField f = averaged_selection_field(params);
        const PeriodicOrbit orbit = find_periodic_orbit(f, ScaleMode::unit(), 1, {0.7}, 1e-13);
        const double pbar = 0.75;
        const double analytic = 1.0 - params.eps * pbar * (1.0 - pbar) * (params.alpha0 + params.beta0);
        CHECK(analytic == 0.9925);
        CHECK(orbit.multipliers[0] == doctest::Approx(analytic).epsilon(1e-6));
    }
    SUBCASE("zero field is neutral and not classified stable") {
        const PeriodicOrbit orbit = find_periodic_orbit(zero_field(), ScaleMode::unit(), 1, {0.3}, 1e-12);
        CHECK(orbit.multipliers[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(!orbit_is_stable(orbit));
    }
}

TEST_CASE("shared fields evaluate identically from concurrent threads") {
    SplitMix64 rng(131);
    const TimeField f = field_from_spec(random_spec(rng, 2, 1.5, 0.1));
    const ScaleMode scale = ScaleMode::eps(0.2);
    const Trajectory serial = iterate(f, scale, 0, {0.2, -0.3}, 200);

    std::vector<Trajectory> results(4);
    std::vector<std::thread> workers;
    for (auto& slot : results)
        workers.emplace_back([&f, &scale, &slot] { slot = iterate(f, scale, 0, {0.2, -0.3}, 200); });
    for (auto& w : workers) w.join();
    for (const Trajectory& t : results) {
        REQUIRE(t.states.size() == serial.states.size());
        for (std::size_t j = 0; j < t.states.size(); ++j)
            CHECK(bit_equal(t.states[j], serial.states[j]));
    }
}

TEST_CASE("trajectories near a contracting orbit approach it over periods") {
    const SelectionParams params = SelectionParams::make(0.01, {0.5, 1.5}, {3.5, 2.5});
    const TimeField f = selection_field(params);
    const PeriodicOrbit orbit = find_periodic_orbit(f, ScaleMode::unit(), 2, {0.75}, 1e-12);
    REQUIRE(orbit.multipliers[0] <= 1.0 - 10.0 * 1e-6);

    const Vec start{orbit.states[0][0] + 1e-3};
    const Trajectory t = iterate(f, ScaleMode::unit(), 0, start, 2 * 1000);
    REQUIRE(!t.exited);
    const double dev_early = std::abs(t.states[2 * 10][0] - orbit.states[0][0]);
    const double dev_late = std::abs(t.states[2 * 1000][0] - orbit.states[0][0]);
    CHECK(dev_late < dev_early);
}
