#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "avgdiff/field.hpp"
#include "avgdiff/vec.hpp"

namespace avgdiff {

/// Step scaling s(n) for the recursion x(n+1) = x(n) + s(n) * X(n, x(n)).
/// Unit is the plain difference equation, Epsilon the small-parameter form,
/// OneOverN the form whose right-hand side vanishes over time.
struct ScaleMode {
    enum class Kind { Unit, Epsilon, OneOverN };
    Kind kind = Kind::Unit;
    double epsilon = 0.0;

    static ScaleMode unit() { return {Kind::Unit, 0.0}; }
    static ScaleMode eps(double e) {
        if (!(e > 0.0)) throw PreconditionError("epsilon scale requires eps > 0");
        return {Kind::Epsilon, e};
    }
    static ScaleMode one_over_n() { return {Kind::OneOverN, 0.0}; }

    double step_factor(Index n) const {
        switch (kind) {
            case Kind::Unit: return 1.0;
            case Kind::Epsilon: return epsilon;
            case Kind::OneOverN: return 1.0 / static_cast<double>(n);
        }
        return 1.0;
    }

    bool operator==(const ScaleMode&) const = default;
};

/// One exact orbit of the recursion. `states[j]` is x(start + j). When the
/// orbit leaves B(K), `exited` holds the index (into `states`) of the first
/// outside state and the trajectory stops there instead of failing.
struct Trajectory {
    Index start = 0;
    std::vector<Vec> states;
    ScaleMode scale;
    std::optional<std::size_t> exited;

    Index time_of(std::size_t j) const { return start + static_cast<Index>(j); }
    std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
    const Vec& back() const { return states.back(); }
};

/// Period-l orbit of the stroboscopic map, anchored at a phase in [0, l).
struct PeriodicOrbit {
    Index period = 1;
    Index anchor_phase = 0;
    std::vector<Vec> states;          // one period, states[0] is the fixed point
    double residual = 0.0;            // |Phi_l(states[0]) - states[0]|
    std::vector<double> multipliers;  // eigenvalue moduli of D(Phi_l), descending
};

/// The single stepping rule shared by every operation in this module; tests
/// recompute steps through it so stored states reproduce bit-identically.
Vec advance_state(const TimeField& field, const ScaleMode& scale, Index n, const Vec& x);

/// Iterates the recursion for `horizon` steps or until B(K) exit.
/// Throws NumericError on a non-finite state, DomainError if x0 starts outside.
Trajectory iterate(const TimeField& field, const ScaleMode& scale, Index n0, const Vec& x0,
                   Index horizon);

/// Phi_l(x): the state after l exact steps starting at time index `phase`.
/// OneOverN is rejected (the map would depend on absolute time).
Vec period_map(const TimeField& field, const ScaleMode& scale, Index phase, const Vec& x, Index l);

struct OrbitSolveOptions {
    int max_iters = 50;
    Index anchor_phase = 0;
};

/// Newton iteration on F(x) = Phi_l(x) - x with a central finite-difference
/// Jacobian (step max(1e-6, 1e-6 |x|)). Multipliers come from the Jacobian of
/// Phi_l at the fixed point.
PeriodicOrbit find_periodic_orbit(const TimeField& field, const ScaleMode& scale, Index l,
                                  const Vec& guess, double tol, const OrbitSolveOptions& opt = {});

/// Eigenvalue moduli of the orbit's linearized period map.
std::vector<double> orbit_multipliers(const PeriodicOrbit& orbit);

/// Eigenvalue moduli of the finite-difference Jacobian of Phi_l at x,
/// sorted descending.
std::vector<double> period_map_multipliers(const TimeField& field, const ScaleMode& scale,
                                           Index phase, const Vec& x, Index l);

/// Stable iff every multiplier modulus is below 1 - margin.
bool orbit_is_stable(const PeriodicOrbit& orbit, double margin = 1e-6);

}  // namespace avgdiff
