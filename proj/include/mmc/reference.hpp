#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "mmc/dataset.hpp"
#include "mmc/engine.hpp"
#include "mmc/errors.hpp"
#include "mmc/geometry.hpp"

namespace mmc {

/// A proven interval around the true hull distance of an instance.
struct MarginCertificate {
    double lower = 0.0;
    double upper = 0.0;
    bool exact = false;
};

namespace detail2d {

inline double cross(const Vector& o, const Vector& a, const Vector& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Andrew's monotone chain; returns the hull CCW with collinear points
/// dropped. Degenerate inputs give a point or a segment.
inline std::vector<Vector> convex_hull(std::vector<Vector> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<Vector> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower_size = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower_size && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

inline bool on_segment(const Vector& a, const Vector& b, const Vector& p) {
    if (cross(a, b, p) != 0.0) return false;
    return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) &&
           std::min(a[1], b[1]) <= p[1] && p[1] <= std::max(a[1], b[1]);
}

inline bool segments_intersect(const Vector& p1, const Vector& p2, const Vector& q1,
                               const Vector& q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    if (((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
        ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))) {
        return true;
    }
    if (d1 == 0.0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0.0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0.0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0.0 && on_segment(p1, p2, q2)) return true;
    return false;
}

/// p inside or on the boundary of a hull produced by convex_hull.
inline bool hull_contains(const std::vector<Vector>& hull, const Vector& p) {
    if (hull.size() == 1) return hull[0] == p;
    if (hull.size() == 2) return on_segment(hull[0], hull[1], p);
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vector& a = hull[i];
        const Vector& b = hull[(i + 1) % hull.size()];
        if (cross(a, b, p) < 0.0) return false;
    }
    return true;
}

inline std::vector<std::pair<Vector, Vector>> hull_edges(const std::vector<Vector>& hull) {
    std::vector<std::pair<Vector, Vector>> edges;
    if (hull.size() == 2) {
        edges.emplace_back(hull[0], hull[1]);
    } else if (hull.size() >= 3) {
        for (std::size_t i = 0; i < hull.size(); ++i) {
            edges.emplace_back(hull[i], hull[(i + 1) % hull.size()]);
        }
    }
    return edges;
}

inline bool hulls_intersect(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    for (const Vector& v : a) {
        if (hull_contains(b, v)) return true;
    }
    for (const Vector& v : b) {
        if (hull_contains(a, v)) return true;
    }
    for (const auto& ea : hull_edges(a)) {
        for (const auto& eb : hull_edges(b)) {
            if (segments_intersect(ea.first, ea.second, eb.first, eb.second)) return true;
        }
    }
    return false;
}

inline double point_segment_distance(const Vector& p, const Vector& a, const Vector& b) {
    const double seg2 = squared_distance(a, b);
    if (seg2 <= 0.0) return distance(p, a);
    double t = dot_diff(p, a, b, a) / seg2;
    t = std::min(1.0, std::max(0.0, t));
    return distance(p, lerp(a, b, t));
}

}  // namespace detail2d

/// Exact Euclidean distance between the convex hulls of two 2D point sets:
/// 0 when the hulls meet, otherwise the minimum over vertex-edge and
/// vertex-vertex pairs across the hulls.
inline double hull_distance_2d(const std::vector<Vector>& black,
                               const std::vector<Vector>& white) {
    if (black.empty() || white.empty()) {
        throw EmptyClass("hull distance needs both classes non-empty");
    }
    for (const Vector& p : black) {
        if (p.size() != 2) throw WrongDimension("hull_distance_2d requires dimension 2");
    }
    for (const Vector& p : white) {
        if (p.size() != 2) throw WrongDimension("hull_distance_2d requires dimension 2");
    }
    const std::vector<Vector> a = detail2d::convex_hull(black);
    const std::vector<Vector> b = detail2d::convex_hull(white);
    if (detail2d::hulls_intersect(a, b)) return 0.0;

    double best = std::numeric_limits<double>::infinity();
    for (const Vector& v : a) {
        for (const auto& e : detail2d::hull_edges(b)) {
            best = std::min(best, detail2d::point_segment_distance(v, e.first, e.second));
        }
    }
    for (const Vector& v : b) {
        for (const auto& e : detail2d::hull_edges(a)) {
            best = std::min(best, detail2d::point_segment_distance(v, e.first, e.second));
        }
    }
    for (const Vector& va : a) {
        for (const Vector& vb : b) {
            best = std::min(best, distance(va, vb));
        }
    }
    return best;
}

/// Certified bracket around the hull distance of a labeled instance, from a
/// known separating direction: the class gap along u is a lower bound, the
/// closest opposite-label pair an upper bound. Works in any dimension.
inline MarginCertificate planted_margin_bounds(const Dataset& data, const Vector& planted_normal) {
    require_labels(data);
    check_same_dim(planted_normal, data.points.empty() ? planted_normal : data.points[0]);
    const double u_norm = norm(planted_normal);
    if (!(u_norm > 0.0)) {
        throw NonPositiveInput("planted normal must be nonzero");
    }

    double min_white = std::numeric_limits<double>::infinity();
    double max_black = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double proj = dot(data.points[i], planted_normal) / u_norm;
        if ((*data.labels)[i] == Label::White) {
            min_white = std::min(min_white, proj);
        } else {
            max_black = std::max(max_black, proj);
        }
    }
    if (!std::isfinite(min_white) || !std::isfinite(max_black)) {
        throw SingleClass("certificate needs both classes non-empty");
    }

    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if ((*data.labels)[i] != Label::Black) continue;
        for (std::size_t j = 0; j < data.size(); ++j) {
            if ((*data.labels)[j] != Label::White) continue;
            upper = std::min(upper, distance(data.points[i], data.points[j]));
        }
    }

    MarginCertificate cert;
    cert.lower = std::max(0.0, min_white - max_black);
    cert.upper = upper;
    cert.exact = false;
    return cert;
}

/// Unoptimized re-implementation of select_candidate with its own arithmetic
/// route, used as a differential oracle. The contract is identical: in-slab
/// point closest to the middle hyperplane first, then lowest wrongly-sided
/// index, else converged.
inline Candidate brute_force_candidate(const Vector& b, const Vector& w, const Dataset& data,
                                       double eps, double tol) {
    require_labels(data);
    if (!(eps > 0.0 && eps < 1.0)) {
        throw EpsOutOfRange("eps must lie in (0,1)");
    }
    check_same_dim(b, w);
    const std::size_t d = b.size();

    // Shrunk anchors straight from the convex-combination formula.
    Vector bp(d), wp(d), mid(d), axis(d);
    for (std::size_t k = 0; k < d; ++k) {
        bp[k] = (1.0 - eps / 2.0) * b[k] + (eps / 2.0) * w[k];
        wp[k] = (eps / 2.0) * b[k] + (1.0 - eps / 2.0) * w[k];
        mid[k] = 0.5 * (bp[k] + wp[k]);
        axis[k] = wp[k] - bp[k];
    }
    double axis_len2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) axis_len2 += axis[k] * axis[k];
    if (axis_len2 <= 0.0) throw DegenerateSegment("witness pair coincides");
    const double axis_len = std::sqrt(axis_len2);

    std::vector<double> ts(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        check_same_dim(data.points[i], b);
        double along = 0.0;
        for (std::size_t k = 0; k < d; ++k) along += (data.points[i][k] - bp[k]) * axis[k];
        ts[i] = along / axis_len2;
    }

    std::optional<std::size_t> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!(ts[i] > tol && ts[i] < 1.0 - tol)) continue;
        double along_mid = 0.0;
        for (std::size_t k = 0; k < d; ++k) along_mid += (data.points[i][k] - mid[k]) * axis[k];
        const double dist_to_mid = std::abs(along_mid) / axis_len;
        if (dist_to_mid < best_dist) {
            best_dist = dist_to_mid;
            best = i;
        }
    }
    if (best) return Candidate{Candidate::Kind::InSlab, best};

    for (std::size_t i = 0; i < data.size(); ++i) {
        const Label l = (*data.labels)[i];
        if ((ts[i] <= tol && l == Label::White) || (ts[i] >= 1.0 - tol && l == Label::Black)) {
            return Candidate{Candidate::Kind::Misclassified, i};
        }
    }
    return Candidate{Candidate::Kind::Converged, std::nullopt};
}

}  // namespace mmc
