#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avgdiff/averaging.hpp"
#include "avgdiff/dynamics.hpp"
#include "avgdiff/field.hpp"

namespace avgdiff {

/// One accepted (eps, delta, T) row of an empirical uniform-asymptotic-
/// stability profile: starts within delta of the reference stay within eps/2
/// over the horizon and re-enter the delta/2 ball after T steps, from every
/// probed start index.
struct StabilityEntry {
    double eps = 0.0;
    double delta = 0.0;
    Index T = 0;
};

struct StabilityProfile {
    Vec xi0;
    ScaleMode scale;
    std::vector<Index> probes;
    int samples_per_shell = 0;
    Index horizon = 0;
    std::optional<std::vector<int>> var_subset;  // 0-based coordinate indices
    std::vector<StabilityEntry> entries;         // sorted by decreasing eps
    std::vector<double> failed_eps;              // eps values with no (delta, T) found

    bool all_succeeded() const { return failed_eps.empty(); }
};

/// Outcome of one theorem-verification cell. `hypothesis_flags` nonempty means
/// the run is inconclusive (a hypothesis failed), which is reported separately
/// from a conclusion violation.
struct TheoremReport {
    enum class Theorem { T1, T2, T3 };
    enum class Status { Holds, Violated, HypothesisFailed };

    Theorem theorem = Theorem::T1;
    std::vector<std::pair<std::string, double>> params;
    bool conclusion_holds = true;
    double max_deviation = 0.0;
    std::optional<Index> first_violation;
    std::vector<std::string> hypothesis_flags;

    Status status() const {
        if (!hypothesis_flags.empty()) return Status::HypothesisFailed;
        return conclusion_holds ? Status::Holds : Status::Violated;
    }
};

std::string to_string(TheoremReport::Theorem t);
std::string to_string(TheoremReport::Status s);

struct UasOptions {
    std::vector<double> eps_grid;  // descending
    std::vector<Index> probes;     // start indices; empty means {n0}
    int samples_per_shell = 8;
    Index horizon = 4096;
    std::optional<std::vector<int>> var_subset;
    std::uint64_t seed = 0;
    int max_delta_halvings = 12;
};

/// Empirically estimates (delta, T) per eps for the solution through xi0.
/// delta is searched on a halving schedule from eps/2; T over power-of-two
/// multiples of 8, up to the horizon. An eps with no accepted pair is recorded
/// in failed_eps rather than raised: that outcome is evidence against uniform
/// asymptotic stability, not a crash.
StabilityProfile estimate_uas(const TimeField& field, const ScaleMode& scale, const Vec& xi0,
                              Index n0, const UasOptions& opt);

struct WindowChoice {
    Index value = 1;
    bool clamped = false;  // set when eps > 1 forced the window to 1
};

/// N(eps) = floor(1/eps), the averaging window tied to the small parameter.
WindowChoice choose_window(double eps);

struct TotalStabilityOptions {
    double eps = 0.1;
    double eta1 = 0.05;   // initial-condition radius
    double eta2 = 0.01;   // window-sum-norm budget for the perturbation
    Index window = 1;     // N
    std::vector<Index> n0_probes = {0};
    int ic_samples = 4;   // per shell; the matched start xi0 is always included
    Index horizon = 10000;
    double snorm_grid_spacing = 0.125;
    Index snorm_probe_limit = 64;
    std::uint64_t seed = 0;
};

/// Simulates x' = x + X + R against the unperturbed reference from xi0 and
/// checks |x(n) - psi(n)| < eps over the horizon. The S-norm hypothesis on R
/// is verified first; its failure flags the report instead of failing the
/// conclusion.
TheoremReport total_stability_check(const TimeField& X, const TimeField& R, const Vec& xi0,
                                    const TotalStabilityOptions& opt);

struct AveragingSweepOptions {
    std::vector<double> eps_list;  // descending
    double alpha = 0.1;
    double beta = 0.01;
    double horizon_constant = 10.0;  // horizon = ceil(horizon_constant / eps)
    Index n0 = 0;
    int ic_samples = 0;  // per shell around xi0; matched start always included
    std::optional<std::vector<int>> var_subset;
    std::uint64_t seed = 0;
    double avg_tol = 1e-9;
};

/// For each eps compares Delta x = eps X(n, x) with Delta x = eps Xbar(x) on
/// a horizon of ceil(horizon_constant/eps) steps; holds iff the sup deviation
/// stays below alpha.
std::vector<TheoremReport> averaging_closeness_sweep(const TimeField& field, const Vec& xi0,
                                                     const AveragingSweepOptions& opt);

struct VanishingSweepOptions {
    std::vector<Index> n0_list;  // ascending, entries >= 1
    double alpha = 0.1;
    double beta = 0.01;
    Index horizon = 10000;
    int ic_samples = 0;
    std::optional<std::vector<int>> var_subset;
    std::uint64_t seed = 0;
    double avg_tol = 1e-9;
};

/// Same comparison for Delta x = (1/n) X(n, x), swept over the starting index
/// n0; the smallness parameter is recorded as 1/n0.
std::vector<TheoremReport> vanishing_rhs_sweep(const TimeField& field, const Vec& xi0,
                                               const VanishingSweepOptions& opt);

}  // namespace avgdiff
