#pragma once

#include <vector>

#include "avgdiff/dynamics.hpp"
#include "avgdiff/field.hpp"
#include "avgdiff/stability.hpp"

namespace avgdiff {

/// Two-allele selection model with genotype fitnesses 1 - eps*alpha(n), 1,
/// 1 - eps*beta(n), where alpha and beta are period-l sequences with positive
/// means. The state is the frequency p of the first allele.
struct SelectionParams {
    double eps = 0.0;
    Index period = 1;
    std::vector<double> alpha_seq;
    std::vector<double> beta_seq;
    double alpha0 = 0.0;  // mean of alpha_seq
    double beta0 = 0.0;   // mean of beta_seq

    /// Computes the means and validates every invariant (positive means,
    /// denominator positivity on a fine p-grid). Throws ParameterError.
    static SelectionParams make(double eps, std::vector<double> alpha_seq,
                                std::vector<double> beta_seq);

    void validate() const;
};

/// One-generation frequency increment of the exact selection recursion.
double selection_rhs(Index n, double p, const SelectionParams& params);

/// Increment of the averaged recursion eps * p(1-p) * (beta0 - (alpha0+beta0) p).
double averaged_selection_rhs(double p, const SelectionParams& params);

/// Equilibrium of the averaged recursion, beta0 / (alpha0 + beta0), in (0, 1).
double selection_equilibrium(const SelectionParams& params);

/// The selection recursion packaged as a unit-scale TimeField on B(1).
TimeField selection_field(const SelectionParams& params);

/// Averaged counterpart as a unit-scale TimeField.
TimeField averaged_selection_field(const SelectionParams& params);

struct SelectionExperimentOptions {
    std::vector<double> p0_list;
    double delta_target = 0.05;
    Index horizon = 100000;
    double entry_radius = 0.1;   // p0 values this close to the equilibrium must comply
    double orbit_tol = 1e-12;
    Index fallback_steps = 100000;  // long-run iteration used when Newton fails
};

struct SelectionRun {
    double p0 = 0.0;
    double dev_averaged = 0.0;  // sup |exact - averaged| from the same p0, whole horizon
    double dev_orbit = 0.0;     // sup |exact - periodic orbit| after the transient
};

struct SelectionExperimentResult {
    PeriodicOrbit orbit;
    bool stable = false;
    bool newton_fallback = false;
    std::vector<SelectionRun> runs;
    TheoremReport report;
};

/// Locates the period-l orbit of the exact recursion (Newton seeded at the
/// averaged equilibrium, long-run iteration as fallback), classifies it, and
/// measures per-start deviations of the exact trajectory from the averaged
/// trajectory and from the orbit. The orbit deviation is taken after a
/// transient of horizon/10 steps. Holds iff both deviations stay below
/// delta_target for every start within entry_radius of the equilibrium.
SelectionExperimentResult selection_experiment(const SelectionParams& params,
                                               const SelectionExperimentOptions& opt);

}  // namespace avgdiff
