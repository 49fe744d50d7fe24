#pragma once

#include "avgdiff/field.hpp"
#include "avgdiff/vec.hpp"

namespace avgdiff {

/// Finite Cesaro mean of a field over the window [start, start + window - 1],
/// with the change seen when doubling the window (a Cauchy-style diagnostic).
struct AverageEstimate {
    Vec x;
    Vec value;
    Index window = 0;
    Index start = 0;
    double cauchy_gap = 0.0;
};

/// Exact finite mean (1/N) sum_{k=n}^{n+N-1} f(k, x), summed left to right.
AverageEstimate cesaro_average(const TimeField& field, const Vec& x, Index n, Index N);

/// Constructive limit of the Cesaro means. Fields with a declared period P
/// short-circuit to the exact one-period mean; otherwise the window doubles
/// from 64 until the gap stays below `tol` twice in a row, up to N = 2^20.
/// Throws AveragingDivergenceError if the estimator never settles.
Vec estimate_average(const TimeField& field, const Vec& x, double tol);

/// max over starts in `probe_starts` of |cesaro mean - avg(x)|. For periodic
/// fields one period of probes makes this the exact sup over all starts; for
/// aperiodic fields it is a lower bound on the true sup.
double uniformity_gap(const TimeField& field, const AveragedField& avg, const Vec& x, Index N,
                      const std::vector<Index>& probe_starts);

/// Wraps the estimator as an AveragedField, inheriting declared metadata
/// (a mean of L-Lipschitz, M-bounded maps is again L-Lipschitz and M-bounded).
AveragedField averaged_field_from(const TimeField& field, double tol);

}  // namespace avgdiff
