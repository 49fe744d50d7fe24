#include "avgdiff/genetics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace avgdiff {

namespace {

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double denominator_term(double alpha, double beta, double p) {
    return (alpha + beta) * p * p + 2.0 * beta * p - beta;
}

}  // namespace

SelectionParams SelectionParams::make(double eps, std::vector<double> alpha_seq,
                                      std::vector<double> beta_seq) {
    SelectionParams params;
    params.eps = eps;
    params.alpha_seq = std::move(alpha_seq);
    params.beta_seq = std::move(beta_seq);
    params.period = static_cast<Index>(params.alpha_seq.size());
    params.alpha0 = mean_of(params.alpha_seq);
    params.beta0 = mean_of(params.beta_seq);
    params.validate();
    return params;
}

void SelectionParams::validate() const {
    if (!(eps > 0.0)) throw ParameterError("selection: eps must be positive");
    if (period < 1 || alpha_seq.size() != static_cast<std::size_t>(period) ||
        beta_seq.size() != static_cast<std::size_t>(period))
        throw ParameterError("selection: fitness sequences must both have length = period");
    if (std::abs(mean_of(alpha_seq) - alpha0) > 1e-15 || std::abs(mean_of(beta_seq) - beta0) > 1e-15)
        throw ParameterError("selection: stored means do not match the sequences");
    if (!(alpha0 > 0.0) || !(beta0 > 0.0))
        throw ParameterError("selection: fitness sequences must have positive means");

    // Denominator positivity: eps * max |(a+b)p^2 + 2bp - b| < 1 on a fine grid.
    double worst = 0.0;
    for (Index n = 0; n < period; ++n) {
        const double a = alpha_seq[static_cast<std::size_t>(n)];
        const double b = beta_seq[static_cast<std::size_t>(n)];
        for (int i = 0; i <= 1000; ++i) {
            const double p = static_cast<double>(i) / 1000.0;
            worst = std::max(worst, std::abs(denominator_term(a, b, p)));
        }
    }
    if (!(eps * worst < 1.0))
        throw ParameterError("selection: eps too large, denominator may vanish on [0,1]");
}

double selection_rhs(Index n, double p, const SelectionParams& params) {
    const auto idx = static_cast<std::size_t>(n % params.period);
    const double a = params.alpha_seq[idx];
    const double b = params.beta_seq[idx];
    const double denom = 1.0 - params.eps * denominator_term(a, b, p);
    if (!(denom > 0.0))
        throw ParameterError("selection_rhs: nonpositive denominator at p = " + std::to_string(p));
    return params.eps * p * (1.0 - p) * (b - (a + b) * p) / denom;
}

double averaged_selection_rhs(double p, const SelectionParams& params) {
    return params.eps * p * (1.0 - p) * (params.beta0 - (params.alpha0 + params.beta0) * p);
}

double selection_equilibrium(const SelectionParams& params) {
    return params.beta0 / (params.alpha0 + params.beta0);
}

// The model is meaningful on [0,1] but the enclosing ball is [-1,1], where the
// denominator has no positivity guarantee; no bound is declared for either
// field so the declared metadata stays sound on the whole domain.
TimeField selection_field(const SelectionParams& params) {
    TimeField f;
    f.domain = Domain{1, 1.0};
    f.period = params.period;
    f.eval = [params](Index n, const Vec& x) { return Vec{selection_rhs(n, x[0], params)}; };
    return f;
}

TimeField averaged_selection_field(const SelectionParams& params) {
    TimeField f;
    f.domain = Domain{1, 1.0};
    f.period = 1;
    f.eval = [params](Index, const Vec& x) { return Vec{averaged_selection_rhs(x[0], params)}; };
    return f;
}

SelectionExperimentResult selection_experiment(const SelectionParams& params,
                                               const SelectionExperimentOptions& opt) {
    params.validate();
    for (double p0 : opt.p0_list) {
        if (!(p0 > 0.0 && p0 < 1.0))
            throw ParameterError("selection_experiment: starts must lie in the open interval (0,1)");
    }

    const TimeField exact = selection_field(params);
    const TimeField averaged = averaged_selection_field(params);
    const ScaleMode unit = ScaleMode::unit();
    const double equilibrium = selection_equilibrium(params);

    SelectionExperimentResult result;
    try {
        result.orbit =
            find_periodic_orbit(exact, unit, params.period, Vec{equilibrium}, opt.orbit_tol);
    } catch (const Error&) {
        // Long-run fallback: run far past the transient and read one period off
        // the tail, then measure how periodic it actually is.
        result.newton_fallback = true;
        Trajectory long_run = iterate(exact, unit, 0, Vec{equilibrium}, opt.fallback_steps);
        const std::size_t tail =
            long_run.states.size() - static_cast<std::size_t>(params.period) - 1;
        const std::size_t anchor = tail - (tail % static_cast<std::size_t>(params.period));
        PeriodicOrbit orbit;
        orbit.period = params.period;
        orbit.anchor_phase = 0;
        for (Index j = 0; j < params.period; ++j)
            orbit.states.push_back(long_run.states[anchor + static_cast<std::size_t>(j)]);
        orbit.residual = sup_dist(long_run.states[anchor + static_cast<std::size_t>(params.period)],
                                  long_run.states[anchor]);
        orbit.multipliers =
            period_map_multipliers(exact, unit, 0, orbit.states.front(), params.period);
        result.orbit = std::move(orbit);
    }
    result.stable = orbit_is_stable(result.orbit);

    TheoremReport report;
    report.theorem = TheoremReport::Theorem::T2;
    report.params = {{"eps", params.eps},
                     {"period", static_cast<double>(params.period)},
                     {"delta_target", opt.delta_target},
                     {"entry_radius", opt.entry_radius},
                     {"horizon", static_cast<double>(opt.horizon)}};
    if (result.newton_fallback) report.hypothesis_flags.push_back("orbit-newton-fallback");

    const Index transient = opt.horizon / 10;
    for (double p0 : opt.p0_list) {
        SelectionRun run;
        run.p0 = p0;
        Trajectory traj = iterate(exact, unit, 0, Vec{p0}, opt.horizon);
        Trajectory avg_traj = iterate(averaged, unit, 0, Vec{p0}, opt.horizon);
        for (std::size_t j = 0; j < traj.states.size(); ++j) {
            run.dev_averaged = std::max(run.dev_averaged, sup_dist(traj.states[j], avg_traj.states[j]));
            if (static_cast<Index>(j) >= transient) {
                const double orbit_p =
                    result.orbit.states[j % static_cast<std::size_t>(params.period)][0];
                run.dev_orbit = std::max(run.dev_orbit, std::abs(traj.states[j][0] - orbit_p));
            }
        }
        if (std::abs(p0 - equilibrium) < opt.entry_radius) {
            const double dev = std::max(run.dev_averaged, run.dev_orbit);
            report.max_deviation = std::max(report.max_deviation, dev);
            if (!(run.dev_averaged < opt.delta_target && run.dev_orbit < opt.delta_target))
                report.conclusion_holds = false;
        }
        result.runs.push_back(run);
    }
    result.report = std::move(report);
    return result;
}

}  // namespace avgdiff
