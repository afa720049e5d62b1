#pragma once

#include <algorithm>
#include <cmath>

#include "clusterir/error.hpp"
#include "clusterir/types.hpp"

namespace clusterir {

inline double dot(const Vec& u, const Vec& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

inline double l2_norm(const Vec& u) {
    return std::sqrt(dot(u, u));
}

inline bool is_zero_vector(const Vec& u) {
    for (double x : u) {
        if (x != 0.0) return false;
    }
    return true;
}

// Cosine of the angle between two non-zero vectors, clamped into [-1, 1].
inline double cosine(const Vec& u, const Vec& v) {
    if (u.size() != v.size())
        throw DomainError("cosine: dimension mismatch");
    double nu = l2_norm(u);
    double nv = l2_norm(v);
    if (nu == 0.0 || nv == 0.0)
        throw DomainError("cosine: zero vector");
    double c = dot(u, v) / (nu * nv);
    return std::clamp(c, -1.0, 1.0);
}

// Cosine distance 1 - cos(u, v), in [0, 2].
inline double cosine_distance(const Vec& u, const Vec& v) {
    return 1.0 - cosine(u, v);
}

} // namespace clusterir
