#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace avgdiff {

using Vec = std::vector<double>;
using Index = std::int64_t;

/// Sup (max-coordinate) norm. All distances and balls in this project use it.
inline double sup_norm(const Vec& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

inline double sup_dist(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Sup distance restricted to a coordinate subset (0-based indices).
inline double sup_dist_subset(const Vec& a, const Vec& b, const std::vector<int>& subset) {
    double m = 0.0;
    for (int i : subset) m = std::max(m, std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]));
    return m;
}

inline bool all_finite(const Vec& x) {
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace avgdiff
