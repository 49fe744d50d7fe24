#pragma once

#include <cstdint>
#include <vector>

#include "avgdiff/vec.hpp"

namespace avgdiff {

/// splitmix64; the project's only randomness primitive, so results are
/// reproducible across standard libraries and platforms.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }
};

/// Deterministic low-discrepancy points on the sup-norm sphere of radius r:
/// sample s pins coordinate s % dim to +-r (faces visited round-robin) and
/// fills the rest with a seeded Weyl sequence in [-r, r]. Count points are
/// returned as offsets from the origin.
std::vector<Vec> shell_points(int dim, double r, int count, std::uint64_t seed);

}  // namespace avgdiff
