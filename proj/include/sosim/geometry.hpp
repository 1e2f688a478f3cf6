#pragma once

// Planar polygon primitives shared by the level-line and Wulff modules:
// signed areas, convex clipping, Minkowski sums, point location and a
// densification-based Hausdorff distance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "sosim/common.hpp"

namespace sosim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

// Closed ring, first vertex not repeated at the end.
struct Polygon {
    std::vector<Vec2> pts;

    std::size_t size() const { return pts.size(); }
    bool empty() const { return pts.empty(); }
};

inline double signed_area(const Polygon& p) {
    double twice = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = p.pts[i];
        const Vec2& b = p.pts[(i + 1) % n];
        twice += cross(a, b);
    }
    return 0.5 * twice;
}

inline Vec2 centroid(const Polygon& p) {
    // Area-weighted centroid; falls back to the vertex mean for degenerate rings.
    double twice = 0.0;
    Vec2 c{0.0, 0.0};
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = p.pts[i];
        const Vec2& b = p.pts[(i + 1) % n];
        const double w = cross(a, b);
        twice += w;
        c = c + w * (a + b);
    }
    if (std::abs(twice) < 1e-300) {
        Vec2 m{0.0, 0.0};
        for (const Vec2& v : p.pts) m = m + v;
        return n ? (1.0 / static_cast<double>(n)) * m : m;
    }
    return (1.0 / (3.0 * twice)) * c;
}

inline void make_ccw(Polygon& p) {
    if (signed_area(p) < 0.0) std::reverse(p.pts.begin(), p.pts.end());
}

inline bool is_convex_ccw(const Polygon& p, double eps = 1e-9) {
    const std::size_t n = p.size();
    if (n < 3) return true;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 e1 = p.pts[(i + 1) % n] - p.pts[i];
        Vec2 e2 = p.pts[(i + 2) % n] - p.pts[(i + 1) % n];
        if (cross(e1, e2) < -eps) return false;
    }
    return true;
}

// Crossing-number test; behavior on the boundary is unspecified.
inline bool point_in_polygon(Vec2 q, const Polygon& p) {
    bool inside = false;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = p.pts[i];
        const Vec2& b = p.pts[(i + 1) % n];
        if ((a.y > q.y) != (b.y > q.y)) {
            const double t = (q.y - a.y) / (b.y - a.y);
            if (q.x < a.x + t * (b.x - a.x)) inside = !inside;
        }
    }
    return inside;
}

// Keep the part of a convex ring with dot(n, x) <= c (one Sutherland-Hodgman step).
inline Polygon clip_half_plane(const Polygon& p, Vec2 n, double c) {
    Polygon out;
    const std::size_t m = p.size();
    if (m == 0) return out;
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2& a = p.pts[i];
        const Vec2& b = p.pts[(i + 1) % m];
        const double da = dot(n, a) - c;
        const double db = dot(n, b) - c;
        if (da <= 0.0) out.pts.push_back(a);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
            const double t = da / (da - db);
            out.pts.push_back(a + t * (b - a));
        }
    }
    return out;
}

inline Polygon dedupe_vertices(const Polygon& p, double eps = 1e-12) {
    Polygon out;
    for (const Vec2& v : p.pts) {
        if (out.pts.empty() || norm(v - out.pts.back()) > eps) out.pts.push_back(v);
    }
    while (out.pts.size() > 1 && norm(out.pts.front() - out.pts.back()) <= eps)
        out.pts.pop_back();
    return out;
}

namespace detail {
// Rotate a CCW ring so it starts at the bottom-most (then left-most) vertex.
inline Polygon start_at_lowest(const Polygon& p) {
    Polygon out = p;
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        const Vec2& v = p.pts[i];
        const Vec2& w = p.pts[best];
        if (v.y < w.y || (v.y == w.y && v.x < w.x)) best = i;
    }
    std::rotate(out.pts.begin(), out.pts.begin() + static_cast<std::ptrdiff_t>(best),
                out.pts.end());
    return out;
}
}  // namespace detail

// Minkowski sum of two convex CCW rings (degenerate points/segments allowed).
inline Polygon minkowski_sum(const Polygon& a, const Polygon& b) {
    if (a.empty() || b.empty()) return {};
    if (a.size() == 1) {
        Polygon out = b;
        for (Vec2& v : out.pts) v = v + a.pts[0];
        return out;
    }
    if (b.size() == 1) return minkowski_sum(b, a);

    const Polygon p = detail::start_at_lowest(a);
    const Polygon q = detail::start_at_lowest(b);
    const std::size_t n = p.size(), m = q.size();
    Polygon out;
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        out.pts.push_back(p.pts[i % n] + q.pts[j % m]);
        if (i >= n) {
            ++j;
            continue;
        }
        if (j >= m) {
            ++i;
            continue;
        }
        const Vec2 ea = p.pts[(i + 1) % n] - p.pts[i % n];
        const Vec2 eb = q.pts[(j + 1) % m] - q.pts[j % m];
        const double cr = cross(ea, eb);
        if (cr > 0.0) {
            ++i;
        } else if (cr < 0.0) {
            ++j;
        } else {
            // Parallel same-direction edges (antiparallel cannot meet here for
            // CCW rings started at their bottom-most vertex).
            ++i;
            ++j;
        }
    }
    return dedupe_vertices(out, 1e-12);
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) return norm(p - a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

// Sample points along a closed ring, at most `resolution` apart, vertices included.
inline std::vector<Vec2> densify(const Polygon& p, double resolution) {
    require(resolution > 0.0, "densify: resolution must be positive");
    std::vector<Vec2> out;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = p.pts[i];
        const Vec2 b = p.pts[(i + 1) % n];
        const double len = norm(b - a);
        const int k = std::max(1, static_cast<int>(std::ceil(len / resolution)));
        for (int s = 0; s < k; ++s) {
            const double t = static_cast<double>(s) / static_cast<double>(k);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

inline double directed_hausdorff(const std::vector<Vec2>& samples, const Polygon& target) {
    double worst = 0.0;
    const std::size_t m = target.size();
    for (const Vec2& s : samples) {
        double best = std::numeric_limits<double>::infinity();
        if (m == 1) best = norm(s - target.pts[0]);
        for (std::size_t j = 0; j < m; ++j) {
            const double d =
                point_segment_distance(s, target.pts[j], target.pts[(j + 1) % m]);
            if (d < best) best = d;
            if (best == 0.0) break;
        }
        if (best > worst) worst = best;
    }
    return worst;
}

// Symmetric Hausdorff distance between closed rings; edges are densified at
// `resolution`, so the result is within O(resolution) of the exact value.
inline double hausdorff_distance(const Polygon& a, const Polygon& b, double resolution) {
    require(!a.empty() && !b.empty(), "hausdorff_distance: empty input");
    const std::vector<Vec2> sa = densify(a, resolution);
    const std::vector<Vec2> sb = densify(b, resolution);
    return std::max(directed_hausdorff(sa, b), directed_hausdorff(sb, a));
}

inline Polygon regular_polygon(int k, double circumradius, Vec2 center = {0.0, 0.0}) {
    require(k >= 3, "regular_polygon: need k >= 3");
    Polygon p;
    p.pts.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const double t = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(k);
        p.pts.push_back({center.x + circumradius * std::cos(t),
                         center.y + circumradius * std::sin(t)});
    }
    return p;
}

// Axis-aligned rectangle as a CCW ring; collapses to a segment or point.
inline Polygon rect_polygon(double x0, double y0, double x1, double y1, double eps = 1e-12) {
    const bool flat_x = std::abs(x1 - x0) <= eps;
    const bool flat_y = std::abs(y1 - y0) <= eps;
    Polygon p;
    if (flat_x && flat_y) {
        p.pts = {{x0, y0}};
    } else if (flat_x) {
        p.pts = {{x0, y0}, {x0, y1}};
    } else if (flat_y) {
        p.pts = {{x0, y0}, {x1, y0}};
    } else {
        p.pts = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    }
    return p;
}

inline Polygon translate(const Polygon& p, Vec2 d) {
    Polygon out = p;
    for (Vec2& v : out.pts) v = v + d;
    return out;
}

inline Polygon scale_about(const Polygon& p, Vec2 c, double s) {
    Polygon out = p;
    for (Vec2& v : out.pts) v = c + s * (v - c);
    return out;
}

}  // namespace sosim
