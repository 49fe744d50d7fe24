#include <doctest.h>

#include <cmath>

#include "avgdiff/genetics.hpp"
#include "test_util.hpp"

using namespace avgdiff;
using namespace testutil;

namespace {

const SelectionParams kStock = SelectionParams::make(0.01, {0.5, 1.5}, {3.5, 2.5});

}  // namespace

TEST_CASE("SelectionParams validation") {
    CHECK(kStock.alpha0 == 1.0);
    CHECK(kStock.beta0 == 3.0);
    CHECK(kStock.period == 2);

    CHECK_THROWS_AS(SelectionParams::make(-0.01, {1.0}, {3.0}), ParameterError);
    CHECK_THROWS_AS(SelectionParams::make(0.01, {-1.0}, {3.0}), ParameterError);  // mean <= 0
    CHECK_THROWS_AS(SelectionParams::make(0.01, {1.0, 2.0}, {3.0}), ParameterError);
    // eps * max |denominator term| >= 1 on [0,1]
    CHECK_THROWS_AS(SelectionParams::make(0.2, {0.5, 1.5}, {3.5, 2.5}), ParameterError);

    SelectionParams tampered = kStock;
    tampered.alpha0 = 2.0;
    CHECK_THROWS_AS(tampered.validate(), ParameterError);
}

TEST_CASE("selection_rhs fixes the endpoints and symmetric midpoint") {
    CHECK(selection_rhs(0, 0.0, kStock) == 0.0);
    CHECK(selection_rhs(1, 1.0, kStock) == 0.0);

    const SelectionParams symmetric = SelectionParams::make(0.01, {2.0}, {2.0});
    CHECK(selection_rhs(5, 0.5, symmetric) == 0.0);

    // periodic lookup wraps by n mod l
    CHECK(selection_rhs(0, 0.3, kStock) == selection_rhs(2, 0.3, kStock));
    CHECK(selection_rhs(1, 0.3, kStock) == selection_rhs(7, 0.3, kStock));
}

TEST_CASE("selection_rhs rejects a vanishing denominator") {
    SelectionParams bad = kStock;
    bad.eps = 0.5;  // bypasses make(); the rhs must still defend itself
    CHECK_THROWS_AS(selection_rhs(0, 1.0, bad), ParameterError);
}

TEST_CASE("averaged_selection_rhs") {
    const SelectionParams p13 = SelectionParams::make(0.01, {1.0}, {3.0});
    CHECK(averaged_selection_rhs(0.0, p13) == 0.0);
    CHECK(averaged_selection_rhs(1.0, p13) == 0.0);
    CHECK(averaged_selection_rhs(0.75, p13) == 0.0);  // equilibrium
    CHECK(averaged_selection_rhs(0.5, p13) == doctest::Approx(0.0025).epsilon(1e-15));
}

TEST_CASE("selection_equilibrium") {
    CHECK(selection_equilibrium(SelectionParams::make(0.01, {2.0}, {2.0})) == 0.5);
    CHECK(selection_equilibrium(SelectionParams::make(0.01, {1.0}, {3.0})) == 0.75);
    CHECK(selection_equilibrium(SelectionParams::make(0.01, {3.0}, {1.0})) == 0.25);
    CHECK(selection_equilibrium(kStock) == 0.75);
}

TEST_CASE("valid parameters keep allele frequencies inside [0,1]") {
    SplitMix64 rng(509);
    int draws = 0;
    while (draws < 10000) {
        const Index l = 1 + static_cast<Index>(rng.next() % 4);
        std::vector<double> alpha(static_cast<std::size_t>(l)), beta(static_cast<std::size_t>(l));
        for (double& v : alpha) v = rng.uniform(0.0, 4.0);
        for (double& v : beta) v = rng.uniform(0.0, 4.0);
        const double eps = rng.uniform(0.001, 0.05);
        SelectionParams params;
        try {
            params = SelectionParams::make(eps, alpha, beta);
        } catch (const ParameterError&) {
            continue;  // zero-mean draws are invalid by construction
        }
        ++draws;
        double p = rng.uniform(1e-6, 1.0 - 1e-6);
        for (Index n = 0; n < 1000; ++n) {
            p += selection_rhs(n, p, params);
            if (!(p >= 0.0 && p <= 1.0)) {
                CAPTURE(eps);
                CAPTURE(p);
                REQUIRE(false);
            }
        }
    }
}

TEST_CASE("period mean of the exact rhs matches the averaged rhs to O(eps)") {
    double previous_constant = 0.0;
    for (double eps : {0.02, 0.01, 0.005}) {
        const SelectionParams params = SelectionParams::make(eps, {0.5, 1.5}, {3.5, 2.5});
        double worst = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double p = static_cast<double>(i) / 100.0;
            double mean = 0.0;
            for (Index n = 0; n < params.period; ++n) mean += selection_rhs(n, p, params);
            mean /= static_cast<double>(params.period);
            worst = std::max(worst, std::abs(mean / eps - averaged_selection_rhs(p, params) / eps));
        }
        const double constant = worst / eps;
        MESSAGE("eps=", eps, " measured averaging-consistency constant C=", constant);
        CHECK(constant < 20.0);
        if (previous_constant != 0.0)
            CHECK(constant == doctest::Approx(previous_constant).epsilon(0.25));
        previous_constant = constant;
    }
}

TEST_CASE("averaged map derivative at the equilibrium") {
    const SelectionParams params = SelectionParams::make(0.01, {1.0}, {3.0});
    const double pbar = selection_equilibrium(params);
    const double analytic = 1.0 - params.eps * pbar * (1.0 - pbar) * (params.alpha0 + params.beta0);

    const double h = 1e-6;
    const auto map = [&](double p) { return p + averaged_selection_rhs(p, params); };
    const double fd = (map(pbar + h) - map(pbar - h)) / (2.0 * h);
    CHECK(std::abs(fd - analytic) < 1e-8);
    CHECK(std::abs(analytic) < 1.0);
}

TEST_CASE("orbit collapses onto the equilibrium as eps shrinks") {
    SelectionExperimentOptions opt;
    opt.p0_list = {0.7};
    opt.horizon = 20000;
    opt.delta_target = 0.05;

    double dev[2];
    int i = 0;
    for (double eps : {0.02, 0.01}) {
        const SelectionParams params = SelectionParams::make(eps, {0.5, 1.5}, {3.5, 2.5});
        const SelectionExperimentResult result = selection_experiment(params, opt);
        const double pbar = selection_equilibrium(params);
        double worst = 0.0;
        for (const Vec& s : result.orbit.states) worst = std::max(worst, std::abs(s[0] - pbar));
        dev[i++] = worst;
    }
    const double ratio = dev[1] / dev[0];
    CHECK(ratio >= 0.3);
    CHECK(ratio <= 0.7);
}

TEST_CASE("selection_experiment") {
    SUBCASE("constant fitness reduces to the averaged equilibrium") {
        const SelectionParams params = SelectionParams::make(0.01, {1.0}, {3.0});
        SelectionExperimentOptions opt;
        opt.p0_list = {0.6};
        opt.horizon = 20000;
        opt.delta_target = 0.05;
        const SelectionExperimentResult result = selection_experiment(params, opt);

        // 1-d root oracle: the interior zero of the exact increment is exactly
        // the equilibrium because only the numerator can vanish
        double lo = 0.5, hi = 0.9;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (selection_rhs(0, mid, params) > 0.0 ? lo : hi) = mid;
        }
        CHECK(result.orbit.states[0][0] == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));
        CHECK(std::abs(result.orbit.states[0][0] - 0.75) < 10.0 * params.eps);
        CHECK(result.stable);
        CHECK(!result.newton_fallback);
        CHECK(result.report.status() == TheoremReport::Status::Holds);
    }
    SUBCASE("periodic fitness example") {
        SelectionExperimentOptions opt;
        opt.p0_list = {0.6, 0.7, 0.8};
        opt.horizon = 100000;
        opt.delta_target = 0.05;
        const SelectionExperimentResult result = selection_experiment(kStock, opt);

        REQUIRE(result.orbit.states.size() == 2);
        for (const Vec& s : result.orbit.states) {
            CHECK(s[0] > 0.70);
            CHECK(s[0] < 0.80);
        }
        CHECK(result.orbit.residual <= 1e-10);
        CHECK(result.orbit.multipliers[0] < 1.0);
        CHECK(result.stable);
        for (const SelectionRun& run : result.runs) {
            CHECK(run.dev_orbit < 0.02);        // captured by the orbit after the transient
            CHECK(run.dev_averaged < 0.05);
        }
        CHECK(result.report.status() == TheoremReport::Status::Holds);
    }
    SUBCASE("boundary starts are rejected") {
        SelectionExperimentOptions opt;
        opt.p0_list = {0.0};
        CHECK_THROWS_AS(selection_experiment(kStock, opt), ParameterError);
    }
}
