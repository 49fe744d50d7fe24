#include "avgdiff/sampling.hpp"

#include <cmath>

namespace avgdiff {

namespace {

// frac(sqrt(p)) for the first few primes; standard Kronecker-sequence slopes.
double weyl_slope(int i) {
    static const double kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    const double s = std::sqrt(kPrimes[i % 12]);
    return s - std::floor(s);
}

}  // namespace

std::vector<Vec> shell_points(int dim, double r, int count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> offset(static_cast<std::size_t>(dim));
    for (double& o : offset) o = rng.next_double();

    std::vector<Vec> points;
    points.reserve(static_cast<std::size_t>(count));
    for (int s = 0; s < count; ++s) {
        const int face = s % (2 * dim);
        const int pinned = face % dim;
        const double sign = face < dim ? 1.0 : -1.0;
        Vec p(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) {
            if (i == pinned) {
                p[static_cast<std::size_t>(i)] = sign * r;
            } else {
                double u = offset[static_cast<std::size_t>(i)] +
                           static_cast<double>(s + 1) * weyl_slope(i);
                u -= std::floor(u);
                p[static_cast<std::size_t>(i)] = (2.0 * u - 1.0) * r;
            }
        }
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace avgdiff
