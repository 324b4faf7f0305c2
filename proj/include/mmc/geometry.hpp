#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mmc/errors.hpp"

namespace mmc {

/// A point in R^d. Dimension is the vector length; coordinates must be finite.
using Vector = std::vector<double>;

inline void check_same_dim(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("vectors have dimensions " + std::to_string(a.size()) +
                                " and " + std::to_string(b.size()));
    }
}

inline bool all_finite(const Vector& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline double dot(const Vector& a, const Vector& b) {
    check_same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// (a - u) . (b - v) without forming temporaries.
inline double dot_diff(const Vector& a, const Vector& u, const Vector& b, const Vector& v) {
    check_same_dim(a, u);
    check_same_dim(a, b);
    check_same_dim(a, v);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - u[i]) * (b[i] - v[i]);
    return s;
}

inline double squared_distance(const Vector& a, const Vector& b) {
    return dot_diff(a, b, a, b);
}

inline double distance(const Vector& a, const Vector& b) {
    return std::sqrt(squared_distance(a, b));
}

inline double norm(const Vector& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

/// (1 - t) * u + t * v, computed as u + t * (v - u).
inline Vector lerp(const Vector& u, const Vector& v, double t) {
    check_same_dim(u, v);
    Vector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] + t * (v[i] - u[i]);
    return r;
}

/// The region between the two parallel hyperplanes through anchor_b and
/// anchor_w, each orthogonal to (anchor_w - anchor_b). A point p belongs to
/// the slab iff its projection parameter t(p) lies in the open interval (0,1),
/// where t(p) = (p - b).(w - b) / |w - b|^2.
struct Slab {
    Vector anchor_b;  // black-side anchor, level set t = 0
    Vector anchor_w;  // white-side anchor, level set t = 1
};

/// Projection parameter of p relative to the slab axis. t = 0 at anchor_b,
/// t = 1 at anchor_w.
inline double slab_param(const Slab& s, const Vector& p) {
    check_same_dim(s.anchor_b, s.anchor_w);
    check_same_dim(s.anchor_b, p);
    const double axis2 = dot_diff(s.anchor_w, s.anchor_b, s.anchor_w, s.anchor_b);
    if (axis2 <= 0.0) {
        throw DegenerateSegment("slab anchors coincide");
    }
    return dot_diff(p, s.anchor_b, s.anchor_w, s.anchor_b) / axis2;
}

inline double slab_length(const Slab& s) {
    return distance(s.anchor_b, s.anchor_w);
}

/// Which closed side of a slab a point falls on. Boundary points count as
/// being on the adjacent side, not in the interior.
enum class Side { Black, White, Interior };

inline const char* to_string(Side s) {
    switch (s) {
        case Side::Black: return "black";
        case Side::White: return "white";
        default: return "interior";
    }
}

/// Result of projecting a point onto a segment, together with the quantities
/// the training loop's analysis is phrased in.
struct StepGeometry {
    Vector foot;         // nearest point to a on the segment [u, v]
    double t_unclamped;  // (a-u).(v-u) / |v-u|^2
    double t_clamped;    // t_unclamped clamped to [0, 1]; foot = u + t_clamped*(v-u)
    double cos_alpha;    // cosine of the angle at u between (a-u) and (v-u); 0 if a == u
};

/// Projects a onto the segment [u, v]. The parameter is clamped so the foot
/// stays a convex combination of the segment endpoints.
inline StepGeometry project_onto_segment(const Vector& a, const Vector& u, const Vector& v) {
    check_same_dim(a, u);
    check_same_dim(a, v);
    const double seg2 = dot_diff(v, u, v, u);
    if (seg2 <= 0.0) {
        throw DegenerateSegment("projection target segment has zero length");
    }
    const double along = dot_diff(a, u, v, u);
    StepGeometry g;
    g.t_unclamped = along / seg2;
    g.t_clamped = std::min(1.0, std::max(0.0, g.t_unclamped));
    g.foot = lerp(u, v, g.t_clamped);
    const double a_dist2 = dot_diff(a, u, a, u);
    g.cos_alpha = a_dist2 > 0.0 ? along / (std::sqrt(a_dist2) * std::sqrt(seg2)) : 0.0;
    return g;
}

/// Shrinks the slab by a factor (1 - eps) about its middle hyperplane:
/// b' = (1 - eps/2) b + (eps/2) w and w' = (eps/2) b + (1 - eps/2) w.
inline Slab shrink_slab(const Slab& s, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw EpsOutOfRange("eps must lie in (0,1), got " + std::to_string(eps));
    }
    check_same_dim(s.anchor_b, s.anchor_w);
    return Slab{lerp(s.anchor_b, s.anchor_w, eps / 2.0),
                lerp(s.anchor_b, s.anchor_w, 1.0 - eps / 2.0)};
}

/// Open membership: tol < t(p) < 1 - tol. tol guards boundary round-off.
inline bool slab_contains(const Slab& s, const Vector& p, double tol) {
    const double t = slab_param(s, p);
    return t > tol && t < 1.0 - tol;
}

/// Euclidean distance from p to the slab's middle hyperplane (through
/// (b+w)/2 with normal w-b).
inline double mid_distance(const Slab& s, const Vector& p) {
    const double t = slab_param(s, p);
    return std::abs(t - 0.5) * slab_length(s);
}

inline Side side_of(const Slab& s, const Vector& p, double tol) {
    const double t = slab_param(s, p);
    if (t <= tol) return Side::Black;
    if (t >= 1.0 - tol) return Side::White;
    return Side::Interior;
}

/// Upper bound on the diameter of a point set: exact O(n^2) scan for small
/// inputs, bounding-box diagonal (within a sqrt(d) factor) for large ones.
inline double diameter_upper_bound(const std::vector<Vector>& points) {
    if (points.empty()) {
        throw EmptyInput("diameter of an empty point set");
    }
    constexpr std::size_t kExactScanLimit = 2048;
    const std::size_t n = points.size();
    if (n <= kExactScanLimit) {
        double best2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                best2 = std::max(best2, squared_distance(points[i], points[j]));
            }
        }
        return std::sqrt(best2);
    }
    const std::size_t d = points[0].size();
    Vector lo = points[0];
    Vector hi = points[0];
    for (const Vector& p : points) {
        check_same_dim(p, lo);
        for (std::size_t k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], p[k]);
            hi[k] = std::max(hi[k], p[k]);
        }
    }
    double diag2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) diag2 += (hi[k] - lo[k]) * (hi[k] - lo[k]);
    return std::sqrt(diag2);
}

}  // namespace mmc
