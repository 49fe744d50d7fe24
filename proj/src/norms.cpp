#include "avgdiff/norms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace avgdiff {

namespace {

constexpr Index kMaxGridPoints = 10'000'000;

// Axis points j*spacing covering [-K, K], with the endpoints appended when
// K is not a grid multiple (window sups are typically attained on the boundary).
std::vector<double> axis_points(double radius, double spacing) {
    const auto half = static_cast<Index>(std::floor(radius / spacing + 1e-12));
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(2 * half + 3));
    if (static_cast<double>(half) * spacing < radius * (1.0 - 1e-12)) pts.push_back(-radius);
    for (Index j = -half; j <= half; ++j) pts.push_back(static_cast<double>(j) * spacing);
    if (static_cast<double>(half) * spacing < radius * (1.0 - 1e-12)) pts.push_back(radius);
    return pts;
}

WindowNormReport window_norm_impl(const TimeField& field, Index N, double grid_spacing,
                                  Index probe_limit, bool absolute) {
    if (N < 1) throw PreconditionError("window norm: N must be positive");
    if (!(grid_spacing > 0.0) || grid_spacing > field.domain.radius)
        throw PreconditionError("window norm: grid_spacing must lie in (0, K]");
    if (probe_limit < 1) throw PreconditionError("window norm: probe_limit must be >= 1");

    const int m = field.domain.dim;
    const std::vector<double> axis = axis_points(field.domain.radius, grid_spacing);

    double total = 1.0;
    for (int i = 0; i < m; ++i) {
        total *= static_cast<double>(axis.size());
        if (total > static_cast<double>(kMaxGridPoints))
            throw ResourceError("window norm: grid exceeds 1e7 points; use coarser spacing");
    }

    Index probe_end = probe_limit;
    bool exact = false;
    if (field.period) {
        probe_end = std::min(probe_limit, *field.period);
        exact = probe_end >= *field.period - 1;
    }

    WindowNormReport report;
    report.window = N;
    report.grid_spacing = grid_spacing;
    report.probe_limit = probe_end;
    report.sup_over_n_exact = exact;
    report.value = -1.0;

    // n-major iteration with strict improvement implements the deterministic
    // tie-break: smallest witness_n, then lexicographically smallest witness_x.
    std::vector<std::size_t> odo(static_cast<std::size_t>(m), 0);
    for (Index n = 0; n <= probe_end; ++n) {
        std::fill(odo.begin(), odo.end(), 0);
        Vec x(static_cast<std::size_t>(m));
        while (true) {
            for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] = axis[odo[static_cast<std::size_t>(i)]];

            double window_value;
            if (absolute) {
                double acc = 0.0;
                for (Index k = n; k < n + N; ++k) acc += sup_norm(field.eval(k, x));
                window_value = acc;
            } else {
                Vec acc(static_cast<std::size_t>(m), 0.0);
                for (Index k = n; k < n + N; ++k) {
                    const Vec v = field.eval(k, x);
                    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
                }
                window_value = sup_norm(acc);
            }
            if (window_value > report.value) {
                report.value = window_value;
                report.witness_n = n;
                report.witness_x = x;
            }

            int axis_idx = m - 1;
            while (axis_idx >= 0) {
                if (++odo[static_cast<std::size_t>(axis_idx)] < axis.size()) break;
                odo[static_cast<std::size_t>(axis_idx)] = 0;
                --axis_idx;
            }
            if (axis_idx < 0) break;
        }
    }

    if (field.lipschitz)
        report.upper_bound =
            report.value + static_cast<double>(N) * *field.lipschitz * grid_spacing / 2.0;
    return report;
}

}  // namespace

WindowNormReport window_sum_norm(const TimeField& field, Index N, double grid_spacing,
                                 Index probe_limit) {
    return window_norm_impl(field, N, grid_spacing, probe_limit, /*absolute=*/false);
}

WindowNormReport window_abs_norm(const TimeField& field, Index N, double grid_spacing,
                                 Index probe_limit) {
    return window_norm_impl(field, N, grid_spacing, probe_limit, /*absolute=*/true);
}

QuantizedTrajectory quantize_to_net(const Trajectory& traj, double delta, double radius) {
    if (!(delta > 0.0)) throw PreconditionError("quantize_to_net: delta must be positive");
    if (traj.exited) throw PreconditionError("quantize_to_net: trajectory left B(K)");

    QuantizedTrajectory q;
    q.delta = delta;
    q.states.reserve(traj.states.size());

    // Outermost grid multiple inside [-K, K]. Rounding outward and clamping to
    // +-K would admit two extra values per axis and break the
    // (ceil(2K/delta)+1)^m count when K is not a grid multiple.
    const double edge = std::floor(radius / delta) * delta;

    std::set<Vec> distinct;
    for (const Vec& x : traj.states) {
        Vec snapped(x.size());
        double err = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double v = std::round(x[i] / delta) * delta;
            v = std::clamp(v, -edge, edge);
            snapped[i] = v;
            err = std::max(err, std::abs(x[i] - v));
        }
        q.max_error = std::max(q.max_error, err);
        distinct.insert(snapped);
        q.states.push_back(std::move(snapped));
    }
    q.value_count = static_cast<Index>(distinct.size());
    return q;
}

LemmaCheckReport lemma_check(const TimeField& field, const Trajectory& traj, Index N, double eta) {
    if (traj.exited) throw PreconditionError("lemma_check: trajectory left B(K)");
    if (static_cast<Index>(traj.states.size()) < N)
        throw PreconditionError("lemma_check: trajectory shorter than the window");

    LemmaCheckReport report;
    const Index last_start = static_cast<Index>(traj.states.size()) - N;
    for (Index j = 0; j <= last_start; ++j) {
        Vec acc(traj.states.front().size(), 0.0);
        for (Index k = j; k < j + N; ++k) {
            const Vec v = field.eval(traj.start + k, traj.states[static_cast<std::size_t>(k)]);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
        }
        const double s = sup_norm(acc);
        if (s > report.lhs) {
            report.lhs = s;
            report.witness_n = traj.start + j;
        }
    }
    report.holds = report.lhs < eta;
    return report;
}

std::vector<double> gronwall_envelope(const std::vector<double>& forcing, double L) {
    if (L < 0.0) throw PreconditionError("gronwall_envelope: L must be nonnegative");
    for (double f : forcing) {
        if (!(f >= 0.0)) throw PreconditionError("gronwall_envelope: forcing must be nonnegative");
    }
    std::vector<double> b(forcing.size());
    if (forcing.empty()) return b;
    b[0] = forcing[0];
    for (std::size_t j = 0; j + 1 < forcing.size(); ++j)
        b[j + 1] = forcing[j + 1] + (1.0 + L) * (b[j] - forcing[j]) + L * forcing[j];
    return b;
}

}  // namespace avgdiff
