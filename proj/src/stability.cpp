#include "avgdiff/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "avgdiff/norms.hpp"
#include "avgdiff/sampling.hpp"

namespace avgdiff {

std::string to_string(TheoremReport::Theorem t) {
    switch (t) {
        case TheoremReport::Theorem::T1: return "T1";
        case TheoremReport::Theorem::T2: return "T2";
        case TheoremReport::Theorem::T3: return "T3";
    }
    return "?";
}

std::string to_string(TheoremReport::Status s) {
    switch (s) {
        case TheoremReport::Status::Holds: return "holds";
        case TheoremReport::Status::Violated: return "violated";
        case TheoremReport::Status::HypothesisFailed: return "hypothesis-failed";
    }
    return "?";
}

namespace {

void validate_subset(const std::optional<std::vector<int>>& subset, int dim) {
    if (!subset) return;
    if (subset->empty()) throw PreconditionError("var_subset must be nonempty when given");
    for (int i : *subset) {
        if (i < 0 || i >= dim) throw PreconditionError("var_subset index out of range");
    }
}

double state_dist(const Vec& a, const Vec& b, const std::optional<std::vector<int>>& subset) {
    return subset ? sup_dist_subset(a, b, *subset) : sup_dist(a, b);
}

// Initial conditions at sup-norm distance exactly r from xi0. With a variable
// subset only those coordinates are displaced.
std::vector<Vec> ics_at_radius(const Vec& xi0, double r, int count, std::uint64_t seed,
                               const std::optional<std::vector<int>>& subset) {
    const int dim = subset ? static_cast<int>(subset->size()) : static_cast<int>(xi0.size());
    std::vector<Vec> ics;
    for (const Vec& offset : shell_points(dim, r, count, seed)) {
        Vec x0 = xi0;
        if (subset) {
            for (std::size_t j = 0; j < subset->size(); ++j)
                x0[static_cast<std::size_t>((*subset)[j])] += offset[j];
        } else {
            for (std::size_t j = 0; j < x0.size(); ++j) x0[j] += offset[j];
        }
        ics.push_back(std::move(x0));
    }
    return ics;
}

// Matched start plus two sampled shells at radius/2 and 0.9*radius.
std::vector<Vec> ball_samples(const Vec& xi0, double radius, int per_shell, std::uint64_t seed,
                              const std::optional<std::vector<int>>& subset) {
    std::vector<Vec> ics{xi0};
    if (per_shell > 0 && radius > 0.0) {
        for (int shell = 0; shell < 2; ++shell) {
            const double r = shell == 0 ? radius / 2.0 : 0.9 * radius;
            auto pts = ics_at_radius(xi0, r, per_shell, seed + static_cast<std::uint64_t>(shell),
                                     subset);
            ics.insert(ics.end(), pts.begin(), pts.end());
        }
    }
    return ics;
}

TimeField sum_field(const TimeField& a, const TimeField& b) {
    if (a.domain.dim != b.domain.dim)
        throw SpecError("cannot add fields of different dimensions");
    TimeField s;
    s.domain = a.domain;
    if (a.bound && b.bound) s.bound = *a.bound + *b.bound;
    if (a.lipschitz && b.lipschitz) s.lipschitz = *a.lipschitz + *b.lipschitz;
    if (a.period && b.period) s.period = std::lcm(*a.period, *b.period);
    s.eval = [fa = a.eval, fb = b.eval](Index n, const Vec& x) {
        Vec v = fa(n, x);
        const Vec w = fb(n, x);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += w[i];
        return v;
    };
    return s;
}

TimeField time_field_of(const AveragedField& avg) {
    TimeField f;
    f.domain = avg.domain;
    f.bound = avg.bound;
    f.lipschitz = avg.lipschitz;
    f.period = 1;
    f.eval = [a = avg.eval](Index, const Vec& x) { return a(x); };
    return f;
}

void add_flag(std::vector<std::string>& flags, const std::string& flag) {
    if (std::find(flags.begin(), flags.end(), flag) == flags.end()) flags.push_back(flag);
}

}  // namespace

StabilityProfile estimate_uas(const TimeField& field, const ScaleMode& scale, const Vec& xi0,
                              Index n0, const UasOptions& opt) {
    if (opt.eps_grid.empty()) throw PreconditionError("estimate_uas: eps_grid must be nonempty");
    for (std::size_t i = 0; i < opt.eps_grid.size(); ++i) {
        if (!(opt.eps_grid[i] > 0.0)) throw PreconditionError("estimate_uas: eps must be positive");
        if (i > 0 && opt.eps_grid[i] > opt.eps_grid[i - 1])
            throw PreconditionError("estimate_uas: eps_grid must be descending");
    }
    validate_subset(opt.var_subset, field.domain.dim);

    StabilityProfile profile;
    profile.xi0 = xi0;
    profile.scale = scale;
    profile.probes = opt.probes.empty() ? std::vector<Index>{n0} : opt.probes;
    profile.samples_per_shell = opt.samples_per_shell;
    profile.horizon = opt.horizon;
    profile.var_subset = opt.var_subset;

    // Reference solutions, one per probed start index.
    std::vector<Trajectory> refs;
    double ref_sup = 0.0;
    for (Index probe : profile.probes) {
        Trajectory ref = iterate(field, scale, probe, xi0, opt.horizon);
        if (ref.exited)
            throw PreconditionError("estimate_uas: reference solution left B(K)");
        for (const Vec& s : ref.states) ref_sup = std::max(ref_sup, sup_norm(s));
        refs.push_back(std::move(ref));
    }
    if (ref_sup + opt.eps_grid.front() > field.domain.radius)
        throw PreconditionError(
            "estimate_uas: the eps-neighborhood of the reference does not fit inside B(K)");

    std::vector<Index> t_candidates;
    for (Index t = 8; t <= opt.horizon; t *= 2) t_candidates.push_back(t);

    for (double eps : opt.eps_grid) {
        bool accepted = false;
        double delta = eps / 2.0;
        for (int halving = 0; halving <= opt.max_delta_halvings && !accepted; ++halving) {
            bool stays_close = true;
            std::vector<double> dev_at_t(t_candidates.size(), 0.0);

            for (std::size_t pi = 0; pi < profile.probes.size() && stays_close; ++pi) {
                const Index probe = profile.probes[pi];
                const Trajectory& ref = refs[pi];
                for (int shell = 0; shell < 2 && stays_close; ++shell) {
                    const double r = shell == 0 ? delta / 2.0 : 0.9 * delta;
                    const auto ics = ics_at_radius(xi0, r, opt.samples_per_shell,
                                                   opt.seed + static_cast<std::uint64_t>(shell),
                                                   opt.var_subset);
                    for (const Vec& x0 : ics) {
                        Trajectory traj = iterate(field, scale, probe, x0, opt.horizon);
                        if (traj.exited) {
                            stays_close = false;
                            break;
                        }
                        for (std::size_t j = 0; j < traj.states.size(); ++j) {
                            const double d = state_dist(traj.states[j], ref.states[j], opt.var_subset);
                            if (d >= eps / 2.0) {
                                stays_close = false;
                                break;
                            }
                            for (std::size_t ti = 0; ti < t_candidates.size(); ++ti) {
                                if (static_cast<Index>(j) == t_candidates[ti])
                                    dev_at_t[ti] = std::max(dev_at_t[ti], d);
                            }
                        }
                        if (!stays_close) break;
                    }
                }
            }

            if (stays_close) {
                for (std::size_t ti = 0; ti < t_candidates.size(); ++ti) {
                    if (dev_at_t[ti] < delta / 2.0) {
                        profile.entries.push_back({eps, delta, t_candidates[ti]});
                        accepted = true;
                        break;
                    }
                }
            }
            delta /= 2.0;
        }
        if (!accepted) profile.failed_eps.push_back(eps);
    }
    return profile;
}

WindowChoice choose_window(double eps) {
    if (!(eps > 0.0)) throw PreconditionError("choose_window: eps must be positive");
    if (eps > 1.0) return {1, true};
    return {static_cast<Index>(std::floor(1.0 / eps)), false};
}

TheoremReport total_stability_check(const TimeField& X, const TimeField& R, const Vec& xi0,
                                    const TotalStabilityOptions& opt) {
    if (!X.lipschitz)
        throw PreconditionError("total_stability_check: X must declare a Lipschitz constant");
    if (!R.bound) throw PreconditionError("total_stability_check: R must declare a bound");

    TheoremReport report;
    report.theorem = TheoremReport::Theorem::T1;

    // Hypothesis: the window-sum norm of the perturbation stays under eta2.
    // The Lipschitz-promoted upper bound is used when available so a passing
    // check is sound, not just a grid observation.
    const WindowNormReport snorm =
        window_sum_norm(R, opt.window, opt.snorm_grid_spacing, opt.snorm_probe_limit);
    const double snorm_value = snorm.upper_bound.value_or(snorm.value);
    if (!(snorm_value < opt.eta2)) add_flag(report.hypothesis_flags, "snorm-hypothesis-violated");

    report.params = {{"eps", opt.eps},
                     {"eta1", opt.eta1},
                     {"eta2", opt.eta2},
                     {"N", static_cast<double>(opt.window)},
                     {"horizon", static_cast<double>(opt.horizon)},
                     {"snorm", snorm_value}};

    const TimeField perturbed = sum_field(X, R);
    const ScaleMode unit = ScaleMode::unit();

    for (Index probe : opt.n0_probes) {
        Trajectory psi = iterate(X, unit, probe, xi0, opt.horizon);
        if (psi.exited) {
            add_flag(report.hypothesis_flags, "reference-domain-exit");
            continue;
        }
        for (const Vec& x0 :
             ball_samples(xi0, opt.eta1, opt.ic_samples, opt.seed, std::nullopt)) {
            Trajectory traj = iterate(perturbed, unit, probe, x0, opt.horizon);
            if (traj.exited) add_flag(report.hypothesis_flags, "domain-exit");
            const std::size_t upto = std::min(traj.states.size(), psi.states.size());
            for (std::size_t j = 0; j < upto; ++j) {
                const double d = sup_dist(traj.states[j], psi.states[j]);
                report.max_deviation = std::max(report.max_deviation, d);
                if (d >= opt.eps) {
                    const Index when = probe + static_cast<Index>(j);
                    if (!report.first_violation || when < *report.first_violation)
                        report.first_violation = when;
                    report.conclusion_holds = false;
                }
            }
        }
    }
    return report;
}

std::vector<TheoremReport> averaging_closeness_sweep(const TimeField& field, const Vec& xi0,
                                                     const AveragingSweepOptions& opt) {
    if (opt.eps_list.empty())
        throw PreconditionError("averaging_closeness_sweep: eps_list must be nonempty");
    for (std::size_t i = 0; i < opt.eps_list.size(); ++i) {
        if (!(opt.eps_list[i] > 0.0))
            throw PreconditionError("averaging_closeness_sweep: eps must be positive");
        if (i > 0 && opt.eps_list[i] > opt.eps_list[i - 1])
            throw PreconditionError("averaging_closeness_sweep: eps_list must be descending");
    }
    validate_subset(opt.var_subset, field.domain.dim);

    std::vector<TheoremReport> reports;
    const AveragedField avg = averaged_field_from(field, opt.avg_tol);
    bool averaging_ok = true;
    try {
        avg.eval(xi0);
    } catch (const AveragingDivergenceError&) {
        averaging_ok = false;
    }
    const TimeField avg_tf = time_field_of(avg);

    for (double eps : opt.eps_list) {
        TheoremReport report;
        report.theorem = TheoremReport::Theorem::T2;
        const auto horizon = static_cast<Index>(std::ceil(opt.horizon_constant / eps));
        report.params = {{"eps", eps},
                         {"alpha", opt.alpha},
                         {"beta", opt.beta},
                         {"N", static_cast<double>(choose_window(eps).value)},
                         {"horizon", static_cast<double>(horizon)}};
        if (!averaging_ok) {
            add_flag(report.hypothesis_flags, "averaging-divergence");
            reports.push_back(std::move(report));
            continue;
        }

        const ScaleMode scale = ScaleMode::eps(eps);
        Trajectory psi = iterate(avg_tf, scale, opt.n0, xi0, horizon);
        if (psi.exited) add_flag(report.hypothesis_flags, "reference-domain-exit");

        for (const Vec& x0 : ball_samples(xi0, opt.beta, opt.ic_samples, opt.seed, opt.var_subset)) {
            Trajectory phi = iterate(field, scale, opt.n0, x0, horizon);
            if (phi.exited) add_flag(report.hypothesis_flags, "domain-exit");
            const std::size_t upto = std::min(phi.states.size(), psi.states.size());
            for (std::size_t j = 0; j < upto; ++j) {
                const double d = state_dist(psi.states[j], phi.states[j], opt.var_subset);
                report.max_deviation = std::max(report.max_deviation, d);
                if (d >= opt.alpha) {
                    const Index when = opt.n0 + static_cast<Index>(j);
                    if (!report.first_violation || when < *report.first_violation)
                        report.first_violation = when;
                    report.conclusion_holds = false;
                }
            }
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

std::vector<TheoremReport> vanishing_rhs_sweep(const TimeField& field, const Vec& xi0,
                                               const VanishingSweepOptions& opt) {
    if (opt.n0_list.empty()) throw PreconditionError("vanishing_rhs_sweep: n0_list must be nonempty");
    for (std::size_t i = 0; i < opt.n0_list.size(); ++i) {
        if (opt.n0_list[i] < 1) throw PreconditionError("vanishing_rhs_sweep: n0 must be >= 1");
        if (i > 0 && opt.n0_list[i] < opt.n0_list[i - 1])
            throw PreconditionError("vanishing_rhs_sweep: n0_list must be ascending");
    }
    validate_subset(opt.var_subset, field.domain.dim);

    std::vector<TheoremReport> reports;
    const AveragedField avg = averaged_field_from(field, opt.avg_tol);
    bool averaging_ok = true;
    try {
        avg.eval(xi0);
    } catch (const AveragingDivergenceError&) {
        averaging_ok = false;
    }
    const TimeField avg_tf = time_field_of(avg);
    const ScaleMode scale = ScaleMode::one_over_n();

    for (Index n0 : opt.n0_list) {
        TheoremReport report;
        report.theorem = TheoremReport::Theorem::T3;
        report.params = {{"n0", static_cast<double>(n0)},
                         {"smallness", 1.0 / static_cast<double>(n0)},
                         {"alpha", opt.alpha},
                         {"beta", opt.beta},
                         {"horizon", static_cast<double>(opt.horizon)}};
        if (!averaging_ok) {
            add_flag(report.hypothesis_flags, "averaging-divergence");
            reports.push_back(std::move(report));
            continue;
        }

        Trajectory psi = iterate(avg_tf, scale, n0, xi0, opt.horizon);
        if (psi.exited) add_flag(report.hypothesis_flags, "reference-domain-exit");

        for (const Vec& x0 : ball_samples(xi0, opt.beta, opt.ic_samples, opt.seed, opt.var_subset)) {
            Trajectory phi = iterate(field, scale, n0, x0, opt.horizon);
            if (phi.exited) add_flag(report.hypothesis_flags, "domain-exit");
            const std::size_t upto = std::min(phi.states.size(), psi.states.size());
            for (std::size_t j = 0; j < upto; ++j) {
                const double d = state_dist(psi.states[j], phi.states[j], opt.var_subset);
                report.max_deviation = std::max(report.max_deviation, d);
                if (d >= opt.alpha) {
                    const Index when = n0 + static_cast<Index>(j);
                    if (!report.first_violation || when < *report.first_violation)
                        report.first_violation = when;
                    report.conclusion_holds = false;
                }
            }
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

}  // namespace avgdiff
