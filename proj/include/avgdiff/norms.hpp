#pragma once

#include <optional>
#include <vector>

#include "avgdiff/dynamics.hpp"
#include "avgdiff/field.hpp"
#include "avgdiff/vec.hpp"

namespace avgdiff {

/// Result of a discretized window-sum sup. `value` is exact in n for fields
/// with a declared period (probe starts clamped to one period) and otherwise
/// a certified lower bound over starts in [0, probe_limit]. When the field
/// declares a Lipschitz constant, `upper_bound` promotes the grid value to a
/// true upper bound by adding N * L * spacing / 2.
struct WindowNormReport {
    Index window = 0;
    double value = 0.0;
    Index witness_n = 0;
    Vec witness_x;
    double grid_spacing = 0.0;
    Index probe_limit = 0;
    bool sup_over_n_exact = false;
    std::optional<double> upper_bound;
};

/// Trajectory snapped to the delta-grid of B(K); the finite-value device used
/// to reduce a continuum of states to at most (ceil(2K/delta)+1)^m points.
struct QuantizedTrajectory {
    std::vector<Vec> states;
    double delta = 0.0;
    Index value_count = 0;  // number of distinct grid points visited
    double max_error = 0.0; // realized sup-norm rounding error, < delta
};

/// sup over grid points x and starts n of |sum_{k=n}^{n+N-1} f(k, x)|.
WindowNormReport window_sum_norm(const TimeField& field, Index N, double grid_spacing,
                                 Index probe_limit);

/// Same sup with |f(k, x)| summed instead (no cancellation allowed).
WindowNormReport window_abs_norm(const TimeField& field, Index N, double grid_spacing,
                                 Index probe_limit);

/// Rounds every coordinate to the nearest multiple of delta, clamped to
/// [-K, K]. Requires a trajectory that never left B(K).
QuantizedTrajectory quantize_to_net(const Trajectory& traj, double delta, double radius);

struct LemmaCheckReport {
    double lhs = 0.0;
    bool holds = false;
    Index witness_n = 0;
};

/// lhs = max over window starts inside the trajectory of
/// |sum_{k=n}^{n+N-1} f(k, x(k))|; holds iff lhs < eta.
LemmaCheckReport lemma_check(const TimeField& field, const Trajectory& traj, Index N, double eta);

/// Discrete Gronwall majorant b(n) = f(n) + L sum_{k<n} f(k) (1+L)^{n-1-k},
/// computed by the O(n) recurrence b(n+1) = f(n+1) + (1+L)(b(n) - f(n)) + L f(n).
/// Any d with d(n) <= L sum_{k<n} d(k) + f(n) satisfies d(n) <= b(n).
std::vector<double> gronwall_envelope(const std::vector<double>& forcing, double L);

}  // namespace avgdiff
