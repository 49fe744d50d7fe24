#include "avgdiff/averaging.hpp"

namespace avgdiff {

namespace {

// Left-to-right window mean; the summation order is part of the contract.
Vec window_mean(const TimeField& field, const Vec& x, Index n, Index N) {
    Vec sum(x.size(), 0.0);
    for (Index k = n; k < n + N; ++k) {
        const Vec v = field.eval(k, x);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
    }
    for (double& s : sum) s /= static_cast<double>(N);
    return sum;
}

void check_point(const TimeField& field, const Vec& x) {
    const double norm = sup_norm(x);
    if (norm > field.domain.radius)
        throw DomainError("averaging: x outside B(K)", norm, field.domain.radius);
}

}  // namespace

AverageEstimate cesaro_average(const TimeField& field, const Vec& x, Index n, Index N) {
    if (N < 1) throw PreconditionError("cesaro_average: N must be positive");
    check_point(field, x);

    AverageEstimate est;
    est.x = x;
    est.start = n;
    est.window = N;
    est.value = window_mean(field, x, n, N);
    est.cauchy_gap = sup_dist(est.value, window_mean(field, x, n, 2 * N));
    return est;
}

Vec estimate_average(const TimeField& field, const Vec& x, double tol) {
    check_point(field, x);
    if (field.period) return window_mean(field, x, 0, *field.period);

    constexpr Index kStart = 64;
    constexpr Index kCap = Index{1} << 20;
    bool prev_ok = false;
    Vec last;
    for (Index N = kStart; N <= kCap; N *= 2) {
        const Vec mean_n = window_mean(field, x, 0, N);
        const Vec mean_2n = window_mean(field, x, 0, 2 * N);
        const double gap = sup_dist(mean_n, mean_2n);
        last = mean_2n;
        if (gap <= tol) {
            if (prev_ok) return last;
            prev_ok = true;
        } else {
            prev_ok = false;
        }
    }
    throw AveragingDivergenceError(
        "estimate_average: Cauchy gap did not settle by N = 2^20; the uniform average may not exist");
}

double uniformity_gap(const TimeField& field, const AveragedField& avg, const Vec& x, Index N,
                      const std::vector<Index>& probe_starts) {
    if (probe_starts.empty()) throw PreconditionError("uniformity_gap: probe_starts must be nonempty");
    const Vec target = avg.eval(x);
    double gap = 0.0;
    for (Index n : probe_starts) {
        const Vec mean = window_mean(field, x, n, N);
        gap = std::max(gap, sup_dist(mean, target));
    }
    return gap;
}

AveragedField averaged_field_from(const TimeField& field, double tol) {
    AveragedField avg;
    avg.domain = field.domain;
    avg.bound = field.bound;
    avg.lipschitz = field.lipschitz;
    avg.eval = [field, tol](const Vec& x) { return estimate_average(field, x, tol); };
    return avg;
}

}  // namespace avgdiff
