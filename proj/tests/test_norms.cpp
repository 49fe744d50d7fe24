#include <doctest.h>

#include <cmath>

#include "avgdiff/averaging.hpp"
#include "avgdiff/genetics.hpp"
#include "avgdiff/norms.hpp"
#include "test_util.hpp"

using namespace avgdiff;
using namespace testutil;

namespace {

// O(n^2) double-sum form of the Gronwall majorant, used as the oracle for the
// O(n) recurrence.
std::vector<double> gronwall_double_sum(const std::vector<double>& f, double L) {
    std::vector<double> b(f.size());
    for (std::size_t n = 0; n < f.size(); ++n) {
        double acc = f[n];
        for (std::size_t k = 0; k < n; ++k)
            acc += L * f[k] * std::pow(1.0 + L, static_cast<double>(n - 1 - k));
        b[n] = acc;
    }
    return b;
}

double window_sum_at(const TimeField& f, Index n, Index N, const Vec& x) {
    Vec acc(x.size(), 0.0);
    for (Index k = n; k < n + N; ++k) {
        const Vec v = f.eval(k, x);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
    }
    return sup_norm(acc);
}

}  // namespace

TEST_CASE("window_sum_norm on closed forms") {
    SUBCASE("constant-in-n field peaks at the ball boundary") {
        const TimeField f = field_from_spec(linear_spec(1.0, 1.0));
        const WindowNormReport r = window_sum_norm(f, 5, 0.25, 64);
        CHECK(r.value == 5.0);
        CHECK(r.witness_n == 0);
        CHECK(r.witness_x[0] == -1.0);  // tie with +1 broken lexicographically
        CHECK(r.sup_over_n_exact);
    }
    SUBCASE("alternating field telescopes") {
        const TimeField f = field_from_spec(scalar_spec(1.0, {term(0.5, {0}, TimeFactorSpec::alternating())}));
        CHECK(window_sum_norm(f, 4, 0.5, 8).value == 0.0);
        CHECK(window_sum_norm(f, 3, 0.5, 8).value == 0.5);
    }
    SUBCASE("witness recomputes to the reported value") {
        SplitMix64 rng(301);
        for (int trial = 0; trial < 8; ++trial) {
            const TimeField f = field_from_spec(random_spec(rng, 2, 1.0));
            const WindowNormReport r = window_sum_norm(f, 7, 0.5, 16);
            CHECK(std::abs(window_sum_at(f, r.witness_n, 7, r.witness_x) - r.value) <= 1e-12);
        }
    }
    SUBCASE("grid resource budget") {
        SplitMix64 rng(337);
        const TimeField f = field_from_spec(random_spec(rng, 3, 1.0));
        CHECK_THROWS_AS(window_sum_norm(f, 1, 1e-4, 1), ResourceError);
    }
    SUBCASE("Lipschitz promotion to an upper bound") {
        const TimeField f = field_from_spec(linear_spec(1.0, 1.0));
        const WindowNormReport r = window_sum_norm(f, 5, 0.25, 8);
        REQUIRE(r.upper_bound.has_value());
        CHECK(*r.upper_bound == r.value + 5.0 * 1.0 * 0.25 / 2.0);
    }
}

TEST_CASE("selection residual window sums stay bounded in N") {
    const SelectionParams params = SelectionParams::make(0.01, {0.5, 1.5}, {3.5, 2.5});
    const TimeField f = selection_field(params);
    const TimeField r = residual_field(f, averaged_field_from(f, 1e-12));

    // period-2 zero-sum residual: even windows cancel, odd windows reduce to a
    // single leading term, so the sup never grows with N
    const WindowNormReport r2 = window_sum_norm(r, 2, 0.25, 16);
    const WindowNormReport r1000 = window_sum_norm(r, 1000, 0.25, 16);
    CHECK(r2.value <= 1e-13);
    CHECK(r1000.value <= 1e-12);

    const WindowNormReport r1 = window_sum_norm(r, 1, 0.25, 16);
    const WindowNormReport r999 = window_sum_norm(r, 999, 0.25, 16);
    CHECK(r999.value == doctest::Approx(r1.value).epsilon(1e-12));

    // brute-force oracle at the witness point across both phases
    for (Index phase : {Index{0}, Index{1}})
        CHECK(window_sum_at(r, phase, 999, r999.witness_x) <= r999.value + 1e-12);
}

TEST_CASE("window_abs_norm forbids cancellation") {
    const TimeField alt = field_from_spec(scalar_spec(1.0, {term(0.5, {0}, TimeFactorSpec::alternating())}));
    CHECK(window_abs_norm(alt, 2, 0.5, 8).value == 1.0);
    const TimeField zero = field_from_spec(scalar_spec(1.0, {}));
    CHECK(window_abs_norm(zero, 10, 0.5, 8).value == 0.0);
}

TEST_CASE("window_abs_norm dominates window_sum_norm") {
    SplitMix64 rng(307);
    for (int trial = 0; trial < 100; ++trial) {
        const TimeField f = field_from_spec(random_spec(rng, 1, 1.0));
        const Index N = 1 + static_cast<Index>(rng.next() % 12);
        const WindowNormReport sum = window_sum_norm(f, N, 0.5, 8);
        const WindowNormReport abs = window_abs_norm(f, N, 0.5, 8);
        CHECK(abs.value >= sum.value - 1e-15);
    }
}

TEST_CASE("window_abs_norm is nondecreasing in N") {
    SplitMix64 rng(311);
    const TimeField f = field_from_spec(random_spec(rng, 1, 1.0));
    double prev = 0.0;
    for (Index N : {Index{1}, Index{2}, Index{5}, Index{9}, Index{20}}) {
        const double v = window_abs_norm(f, N, 0.25, 8).value;
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
}

TEST_CASE("window norms scale exactly under power-of-two field scaling") {
    SplitMix64 rng(313);
    for (int trial = 0; trial < 10; ++trial) {
        const FieldSpec spec = random_spec(rng, 1, 1.0);
        const TimeField f = field_from_spec(spec);
        const TimeField half = field_from_spec(scaled_spec(spec, 0.5));
        const WindowNormReport rf = window_sum_norm(f, 6, 0.25, 8);
        const WindowNormReport rh = window_sum_norm(half, 6, 0.25, 8);
        CHECK(rh.value == 0.5 * rf.value);
        CHECK(rh.witness_n == rf.witness_n);
    }
}

TEST_CASE("quantize_to_net snaps onto the delta grid") {
    SUBCASE("worked rounding example") {
        Trajectory traj;
        traj.start = 0;
        traj.states = {{-1.0}, {-0.4}, {0.1}, {0.9}};
        const QuantizedTrajectory q = quantize_to_net(traj, 0.5, 1.0);
        CHECK(q.states[0][0] == -1.0);
        CHECK(q.states[1][0] == -0.5);
        CHECK(q.states[2][0] == 0.0);
        CHECK(q.states[3][0] == 1.0);
        CHECK(q.value_count == 4);
        CHECK(q.max_error == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(q.max_error < 0.5);
    }
    SUBCASE("constant trajectory visits one value") {
        Trajectory traj;
        traj.states = {{0.3, -0.2}, {0.3, -0.2}, {0.3, -0.2}};
        CHECK(quantize_to_net(traj, 0.25, 1.0).value_count == 1);
    }
    SUBCASE("value count obeys the (ceil(2K/delta)+1)^m budget") {
        SplitMix64 rng(317);
        Trajectory traj;
        for (int i = 0; i < 1000; ++i) traj.states.push_back(random_point(rng, 2, 1.0));
        const QuantizedTrajectory q = quantize_to_net(traj, 0.25, 1.0);
        CHECK(q.value_count <= 81);  // 9 x 9 grid
        CHECK(q.max_error < 0.25);
        for (const Vec& s : q.states) {
            for (double v : s) {
                CHECK(std::abs(v) <= 1.0);
                CHECK(std::abs(v / 0.25 - std::round(v / 0.25)) <= 1e-12);
            }
        }
    }
    SUBCASE("K off the grid still respects the value budget") {
        Trajectory traj;
        for (double v = -1.0; v <= 1.0; v += 0.01) traj.states.push_back({v});
        const QuantizedTrajectory q = quantize_to_net(traj, 0.4, 1.0);
        CHECK(q.value_count <= static_cast<Index>(std::ceil(2.0 / 0.4)) + 1);
        CHECK(q.max_error < 0.4);
    }
    SUBCASE("exited trajectories are rejected") {
        Trajectory traj;
        traj.states = {{0.5}, {1.5}};
        traj.exited = 1;
        CHECK_THROWS_AS(quantize_to_net(traj, 0.25, 1.0), PreconditionError);
    }
}

TEST_CASE("lemma_check bounds trajectory window sums") {
    const TimeField zero = field_from_spec(scalar_spec(1.0, {}));
    Trajectory traj;
    traj.start = 0;
    for (int i = 0; i < 20; ++i) traj.states.push_back({0.3});

    SUBCASE("zero field holds for any eta") {
        const LemmaCheckReport r = lemma_check(zero, traj, 5, 1e-12);
        CHECK(r.lhs == 0.0);
        CHECK(r.holds);
    }
    SUBCASE("alternating field cancels on constant trajectories") {
        const TimeField alt = field_from_spec(scalar_spec(1.0, {term(1.0, {1}, TimeFactorSpec::alternating())}));
        CHECK(lemma_check(alt, traj, 4, 1e-12).lhs == 0.0);
        CHECK(lemma_check(alt, traj, 3, 1.0).lhs == 0.3);
    }
    SUBCASE("window longer than the trajectory is a precondition error") {
        CHECK_THROWS_AS(lemma_check(zero, traj, 21, 1.0), PreconditionError);
    }
    SUBCASE("scaled residuals scale the lhs exactly") {
        const FieldSpec base = scalar_spec(1.0, {term(0.4, {0}, TimeFactorSpec::alternating()),
                                                 term(0.25, {2}, TimeFactorSpec::cos(4))});
        const TimeField x_field = field_from_spec(linear_spec(-1.0, 1.0));
        const Trajectory fixed = iterate(x_field, ScaleMode::eps(0.1), 0, {0.5}, 64);
        REQUIRE(!fixed.exited);
        const double lhs1 = lemma_check(field_from_spec(base), fixed, 7, 1.0).lhs;
        for (double s : {0.5, 0.25}) {
            const double lhs_s = lemma_check(field_from_spec(scaled_spec(base, s)), fixed, 7, 1.0).lhs;
            CHECK(lhs_s == s * lhs1);
        }
    }
}

TEST_CASE("gronwall_envelope") {
    SUBCASE("zero forcing gives a zero envelope") {
        const auto b = gronwall_envelope(std::vector<double>(10, 0.0), 0.8);
        for (double v : b) CHECK(v == 0.0);
    }
    SUBCASE("L = 0 returns the forcing unchanged") {
        const std::vector<double> f{0.1, 0.4, 0.0, 2.0};
        CHECK(gronwall_envelope(f, 0.0) == f);
    }
    SUBCASE("constant forcing has the geometric closed form") {
        const double c = 0.3, L = 0.7;
        const auto b = gronwall_envelope(std::vector<double>(31, c), L);
        const auto oracle = gronwall_double_sum(std::vector<double>(31, c), L);
        for (std::size_t n = 0; n < b.size(); ++n) {
            const double closed = c * std::pow(1.0 + L, static_cast<double>(n));
            CHECK(b[n] == doctest::Approx(closed).epsilon(1e-9));
            CHECK(b[n] == doctest::Approx(oracle[n]).epsilon(1e-12));
        }
    }
    SUBCASE("negative forcing is rejected") {
        CHECK_THROWS_AS(gronwall_envelope({0.1, -0.2}, 0.5), PreconditionError);
        CHECK_THROWS_AS(gronwall_envelope({0.1}, -0.5), PreconditionError);
    }
    SUBCASE("recurrence matches the double sum on random instances") {
        SplitMix64 rng(401);
        for (int trial = 0; trial < 50; ++trial) {
            const double L = rng.uniform(0.0, 1.0);
            std::vector<double> f(2 + rng.next() % 40);
            for (double& v : f) v = rng.uniform(0.0, 2.0);
            const auto fast = gronwall_envelope(f, L);
            const auto slow = gronwall_double_sum(f, L);
            for (std::size_t n = 0; n < f.size(); ++n)
                CHECK(fast[n] == doctest::Approx(slow[n]).epsilon(1e-12));
        }
    }
}

TEST_CASE("gronwall envelope dominates every admissible sequence") {
    SplitMix64 rng(409);
    for (int trial = 0; trial < 500; ++trial) {
        const double L = rng.uniform(0.0, 1.0);
        std::vector<double> f(2 + rng.next() % 49);
        for (double& v : f) v = rng.uniform(0.0, 1.0);
        const auto b = gronwall_envelope(f, L);

        // exact solution of the tight recursion d(n) = L sum d(k) + f(n)
        std::vector<double> d(f.size());
        double running = 0.0;
        for (std::size_t n = 0; n < f.size(); ++n) {
            d[n] = L * running + f[n];
            running += d[n];
        }
        // 1e-9 reads as relative above magnitude one: the envelope reaches
        // (1+L)^50 ~ 1e15 where an absolute 1e-9 is below one ulp
        for (std::size_t n = 0; n < f.size(); ++n) {
            CHECK(d[n] <= b[n] + 1e-9 * std::max(1.0, b[n]));
            CHECK(std::abs(d[n] - b[n]) <= 1e-9 * std::max(1.0, b[n]));
        }
    }
}

TEST_CASE("gronwall envelope dominates measured trajectory deviations") {
    // Perturbed vs unperturbed runs from the same start: the deviation obeys
    // d(n) <= L sum d(k) + |sum R along the perturbed path|.
    SplitMix64 rng(419);
    int usable = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const FieldSpec x_spec = random_spec(rng, 2, 1.0, 0.05);
        const FieldSpec r_spec = random_spec(rng, 2, 1.0, 0.01);
        const TimeField X = field_from_spec(x_spec);
        const TimeField R = field_from_spec(r_spec);
        const TimeField XR = field_from_spec(sum_specs(x_spec, r_spec));
        const Vec x0 = random_point(rng, 2, 0.3);

        const Index horizon = 40;
        const Trajectory x = iterate(XR, ScaleMode::unit(), 0, x0, horizon);
        const Trajectory y = iterate(X, ScaleMode::unit(), 0, x0, horizon);
        if (x.exited || y.exited) continue;
        ++usable;

        std::vector<double> forcing(x.states.size());
        Vec racc(2, 0.0);
        forcing[0] = 0.0;
        for (std::size_t n = 1; n < x.states.size(); ++n) {
            const Vec rv = R.eval(static_cast<Index>(n - 1), x.states[n - 1]);
            for (std::size_t i = 0; i < racc.size(); ++i) racc[i] += rv[i];
            forcing[n] = sup_norm(racc);
        }
        const auto envelope = gronwall_envelope(forcing, *X.lipschitz);
        for (std::size_t n = 0; n < x.states.size(); ++n)
            CHECK(sup_dist(x.states[n], y.states[n]) <= envelope[n] + 1e-9);
    }
    CHECK(usable >= 30);
}
