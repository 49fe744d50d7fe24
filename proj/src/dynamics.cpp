#include "avgdiff/dynamics.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace avgdiff {

namespace {

void check_scale_start(const ScaleMode& scale, Index n0) {
    if (n0 < 0) throw PreconditionError("start index must be nonnegative");
    if (scale.kind == ScaleMode::Kind::OneOverN && n0 < 1)
        throw PreconditionError("one_over_n scale requires start index n0 >= 1");
}

// Finite-difference Jacobian of Phi_l at x, central differences.
Eigen::MatrixXd period_map_jacobian(const TimeField& field, const ScaleMode& scale, Index phase,
                                    const Vec& x, Index l) {
    const int m = field.domain.dim;
    const double h = std::max(1e-6, 1e-6 * sup_norm(x));
    Eigen::MatrixXd jac(m, m);
    for (int j = 0; j < m; ++j) {
        Vec xp = x;
        Vec xm = x;
        xp[static_cast<std::size_t>(j)] += h;
        xm[static_cast<std::size_t>(j)] -= h;
        const Vec fp = period_map(field, scale, phase, xp, l);
        const Vec fm = period_map(field, scale, phase, xm, l);
        for (int i = 0; i < m; ++i)
            jac(i, j) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * h);
    }
    return jac;
}

std::vector<double> eigen_moduli(const Eigen::MatrixXd& jac) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, /*computeEigenvectors=*/false);
    std::vector<double> moduli;
    moduli.reserve(static_cast<std::size_t>(jac.rows()));
    for (Eigen::Index i = 0; i < jac.rows(); ++i) moduli.push_back(std::abs(solver.eigenvalues()[i]));
    std::sort(moduli.rbegin(), moduli.rend());
    return moduli;
}

}  // namespace

Vec advance_state(const TimeField& field, const ScaleMode& scale, Index n, const Vec& x) {
    const Vec dx = field.eval(n, x);
    const double s = scale.step_factor(n);
    Vec next = x;
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = next[i] + s * dx[i];
    return next;
}

Trajectory iterate(const TimeField& field, const ScaleMode& scale, Index n0, const Vec& x0,
                   Index horizon) {
    if (horizon < 1) throw PreconditionError("iterate: horizon must be positive");
    check_scale_start(scale, n0);
    const double norm0 = sup_norm(x0);
    if (norm0 > field.domain.radius)
        throw DomainError("iterate: x0 outside B(K)", norm0, field.domain.radius);

    Trajectory traj;
    traj.start = n0;
    traj.scale = scale;
    traj.states.reserve(static_cast<std::size_t>(horizon) + 1);
    traj.states.push_back(x0);

    for (Index j = 0; j < horizon; ++j) {
        const Index n = n0 + j;
        Vec next = advance_state(field, scale, n, traj.states.back());
        if (!all_finite(next))
            throw NumericError("iterate: non-finite state at index " + std::to_string(n + 1), n + 1);
        traj.states.push_back(std::move(next));
        if (!field.domain.contains(traj.states.back())) {
            traj.exited = traj.states.size() - 1;
            break;
        }
    }
    return traj;
}

Vec period_map(const TimeField& field, const ScaleMode& scale, Index phase, const Vec& x, Index l) {
    if (l < 1) throw PreconditionError("period_map: l must be positive");
    if (phase < 0) throw PreconditionError("period_map: phase must be nonnegative");
    if (scale.kind == ScaleMode::Kind::OneOverN)
        throw UnsupportedScaleError("period_map: one_over_n scale has no stroboscopic map");
    if (field.period && *field.period > 1 && l % *field.period != 0)
        throw PreconditionError("period_map: declared field period must divide l");
    const double norm0 = sup_norm(x);
    if (norm0 > field.domain.radius)
        throw DomainError("period_map: x outside B(K)", norm0, field.domain.radius);

    Vec state = x;
    for (Index j = 0; j < l; ++j) {
        state = advance_state(field, scale, phase + j, state);
        const double norm = sup_norm(state);
        if (norm > field.domain.radius)
            throw DomainError("period_map: orbit left B(K)", norm, field.domain.radius);
    }
    return state;
}

PeriodicOrbit find_periodic_orbit(const TimeField& field, const ScaleMode& scale, Index l,
                                  const Vec& guess, double tol, const OrbitSolveOptions& opt) {
    if (!(tol > 0.0)) throw PreconditionError("find_periodic_orbit: tol must be positive");
    const int m = field.domain.dim;

    Vec x = guess;
    double residual = 0.0;
    bool converged = false;
    for (int it = 0; it <= opt.max_iters; ++it) {
        const Vec phi = period_map(field, scale, opt.anchor_phase, x, l);
        Vec f(phi.size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = phi[i] - x[i];
        residual = sup_norm(f);
        if (residual <= tol) {
            converged = true;
            break;
        }
        if (it == opt.max_iters) break;

        Eigen::MatrixXd a = period_map_jacobian(field, scale, opt.anchor_phase, x, l);
        for (int i = 0; i < m; ++i) a(i, i) -= 1.0;
        // Finite-difference noise makes an exactly singular system look full
        // rank to an LU factorization, so gate on the singular values instead.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double smax = svd.singularValues()(0);
        const double smin = svd.singularValues()(svd.singularValues().size() - 1);
        if (!(smax > 0.0) || smin <= 1e-10 * std::max(smax, 1.0))
            throw SingularityError(
                "find_periodic_orbit: singular Newton Jacobian; try a different guess");
        Eigen::VectorXd rhs(m);
        for (int i = 0; i < m; ++i) rhs(i) = -f[static_cast<std::size_t>(i)];
        const Eigen::VectorXd delta = svd.solve(rhs);
        for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] += delta(i);
        const double norm = sup_norm(x);
        if (norm > field.domain.radius)
            throw DomainError("find_periodic_orbit: Newton iterate left B(K)", norm,
                              field.domain.radius);
    }
    if (!converged)
        throw NonConvergenceError("find_periodic_orbit: no convergence, last residual " +
                                      std::to_string(residual),
                                  residual);

    PeriodicOrbit orbit;
    orbit.period = l;
    orbit.anchor_phase = opt.anchor_phase;
    orbit.residual = residual;
    orbit.states.reserve(static_cast<std::size_t>(l));
    Vec state = x;
    for (Index j = 0; j < l; ++j) {
        orbit.states.push_back(state);
        state = advance_state(field, scale, opt.anchor_phase + j, state);
    }
    orbit.multipliers = eigen_moduli(period_map_jacobian(field, scale, opt.anchor_phase, x, l));
    return orbit;
}

std::vector<double> orbit_multipliers(const PeriodicOrbit& orbit) { return orbit.multipliers; }

std::vector<double> period_map_multipliers(const TimeField& field, const ScaleMode& scale,
                                           Index phase, const Vec& x, Index l) {
    return eigen_moduli(period_map_jacobian(field, scale, phase, x, l));
}

bool orbit_is_stable(const PeriodicOrbit& orbit, double margin) {
    if (orbit.multipliers.empty()) return false;
    return orbit.multipliers.front() < 1.0 - margin;
}

}  // namespace avgdiff
