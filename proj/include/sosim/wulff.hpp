#pragma once

// Predicted scaling-limit geometry: the area-1 Wulff body of a surface
// tension, its dilations, and the boundary of the union of all translates
// of the body inside the unit square (morphological opening), assembled
// into the nested limit ensemble (W_0, W_1, ...).

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sosim/common.hpp"
#include "sosim/geometry.hpp"

namespace sosim {

// Direction-dependent tension, strictly positive and invariant under the
// square's symmetries (quarter-turn and reflection). Built-ins:
//   "constant"    tau = 1            (isotropic; Wulff body ~ disk)
//   "l1"          tau = |n1| + |n2|  (support function of a square)
//   "numeric-sos" tabulated low-temperature level-line free energy
// or an arbitrary table of K samples over [0, 2pi), linearly interpolated.
class SurfaceTension {
  public:
    static SurfaceTension constant() {
        SurfaceTension t;
        t.name_ = "constant";
        t.fn_ = [](double) { return 1.0; };
        return t;
    }

    static SurfaceTension l1() {
        SurfaceTension t;
        t.name_ = "l1";
        t.fn_ = [](double th) { return std::abs(std::cos(th)) + std::abs(std::sin(th)); };
        return t;
    }

    // Free energy per unit horizontal advance of a level-line path whose
    // column increments k carry weight exp(-beta(1 + |k|)), Legendre
    // transformed to fixed slope and folded into [0, pi/4] by the lattice
    // symmetries. Positive only in the low-temperature regime (beta
    // above ~0.9); an experimental stand-in for the unknown exact tension.
    static SurfaceTension numeric_sos(double beta) {
        require(beta > 0.0, "numeric_sos: beta must be > 0");
        SurfaceTension t;
        t.name_ = "numeric-sos";
        t.fn_ = [beta](double th) { return sos_tension(beta, th); };
        return t;
    }

    static SurfaceTension from_table(std::vector<double> samples) {
        require(samples.size() >= 8, "SurfaceTension: need at least 8 samples");
        for (double s : samples)
            require(s > 0.0, "SurfaceTension: samples must be strictly positive");
        const std::size_t n = samples.size();
        require(n % 4 == 0, "SurfaceTension: table size must be divisible by 4");
        for (std::size_t k = 0; k < n; ++k) {
            const double quarter = samples[(k + n / 4) % n];
            const double mirrored = samples[(n - k) % n];
            require(std::abs(samples[k] - quarter) <= 1e-6 * samples[k] &&
                        std::abs(samples[k] - mirrored) <= 1e-6 * samples[k],
                    "SurfaceTension: table breaks the square symmetry");
        }
        SurfaceTension t;
        t.name_ = "table";
        t.table_ = std::move(samples);
        return t;
    }

    double operator()(double theta) const {
        if (fn_) return fn_(theta);
        const std::size_t n = table_.size();
        double u = std::fmod(theta, 2.0 * M_PI);
        if (u < 0.0) u += 2.0 * M_PI;
        const double pos = u / (2.0 * M_PI) * static_cast<double>(n);
        const std::size_t i = static_cast<std::size_t>(pos) % n;
        const double frac = pos - std::floor(pos);
        return (1.0 - frac) * table_[i] + frac * table_[(i + 1) % n];
    }

    const std::string& name() const { return name_; }

  private:
    static double sos_log_step_weight(double beta, double lambda) {
        // log zeta(lambda), zeta = e^-beta (1 + q+/(1-q+) + q-/(1-q-)),
        // q± = exp(-beta ± lambda); defined for |lambda| < beta.
        const double qp = std::exp(-beta + lambda);
        const double qm = std::exp(-beta - lambda);
        return -beta + std::log1p(qp / (1.0 - qp) + qm / (1.0 - qm));
    }

    static double sos_line_free_energy(double beta, double slope) {
        // Legendre transform sup_lambda (lambda s - log zeta) by golden section
        // on the concave objective.
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double lo = 0.0, hi = beta * (1.0 - 1e-9);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        const auto f = [&](double lam) {
            return lam * slope - sos_log_step_weight(beta, lam);
        };
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = f(x1);
            }
        }
        return f(0.5 * (lo + hi));
    }

    static double sos_tension(double beta, double theta) {
        // Fold the normal direction into [0, pi/4]; tan(psi) is the slope of
        // the corresponding level-line path and cos(psi) converts free energy
        // per horizontal unit into energy per unit contour length.
        double u = std::fmod(std::abs(theta), M_PI / 2.0);
        const double psi = std::min(u, M_PI / 2.0 - u);
        return std::cos(psi) * sos_line_free_energy(beta, std::tan(psi));
    }

    std::string name_;
    std::function<double(double)> fn_;
    std::vector<double> table_;
};

inline SurfaceTension tension_by_name(const std::string& name, double beta = 1.5) {
    if (name == "constant") return SurfaceTension::constant();
    if (name == "l1") return SurfaceTension::l1();
    if (name == "numeric-sos") return SurfaceTension::numeric_sos(beta);
    throw std::invalid_argument("unknown tension: " + name +
                                " (expected constant|l1|numeric-sos)");
}

// Convex body from the Wulff construction, rescaled to unit area; carries
// its cumulative dilation factor, so area == r^2.
struct WulffBody {
    Polygon poly;  // CCW, centered at the origin
    double r = 1.0;

    double half_extent_x() const {
        double m = 0.0;
        for (const Vec2& v : poly.pts) m = std::max(m, std::abs(v.x));
        return m;
    }
    double half_extent_y() const {
        double m = 0.0;
        for (const Vec2& v : poly.pts) m = std::max(m, std::abs(v.y));
        return m;
    }
};

// Intersection of the K half-planes {x . n(theta_k) <= tau(theta_k)},
// normalized to area 1.
inline WulffBody wulff_body(const SurfaceTension& tau, int K) {
    require(K >= 8, "wulff_body: need K >= 8 directions");
    double tau_max = 0.0;
    std::vector<double> taus(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const double th = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(K);
        const double t = tau(th);
        require(t > 0.0, "wulff_body: non-positive tension sample");
        taus[static_cast<std::size_t>(k)] = t;
        tau_max = std::max(tau_max, t);
    }
    const double R = 2.0 * tau_max;
    Polygon p = rect_polygon(-R, -R, R, R);
    for (int k = 0; k < K; ++k) {
        const double th = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(K);
        p = clip_half_plane(p, {std::cos(th), std::sin(th)}, taus[static_cast<std::size_t>(k)]);
        check_invariant(p.size() >= 3, "wulff_body: intersection collapsed");
    }
    p = dedupe_vertices(p, 1e-12 * tau_max);
    make_ccw(p);
    const Vec2 c = centroid(p);
    p = translate(p, {-c.x, -c.y});
    const double a = signed_area(p);
    check_invariant(a > 0.0, "wulff_body: degenerate area");
    p = scale_about(p, {0.0, 0.0}, 1.0 / std::sqrt(a));
    check_invariant(is_convex_ccw(p, 1e-9), "wulff_body: result is not convex");
    return WulffBody{std::move(p), 1.0};
}

inline WulffBody dilate(const WulffBody& b, double r) {
    require(r > 0.0 && r <= 1.0, "dilate: r must lie in (0, 1]");
    WulffBody out;
    out.poly = scale_about(b.poly, {0.0, 0.0}, r);
    out.r = b.r * r;
    return out;
}

// Boundary of the union of all translates of the body inside the unit
// square: erosion of the square to an axis-aligned rectangle spanned by the
// body's half-extents, then a convex Minkowski dilation back. Exact for
// polygons; the result is the square with corners replaced by translated
// arcs of the body.
inline Polygon opening_boundary(const WulffBody& b) {
    const double wx = b.half_extent_x();
    const double wy = b.half_extent_y();
    require(2.0 * wx <= 1.0 + 1e-12 && 2.0 * wy <= 1.0 + 1e-12,
            "opening_boundary: body does not fit in the unit square");
    const Polygon eroded = rect_polygon(wx, wy, 1.0 - wx, 1.0 - wy, 1e-12);
    Polygon out = minkowski_sum(eroded, b.poly);
    make_ccw(out);
    return out;
}

// Total length of the curve lying on each side of the unit square, minimized
// over the four sides (the flat contact segments of an opening).
inline double min_side_overlap(const Polygon& curve, double eps = 1e-9) {
    double per_side[4] = {0.0, 0.0, 0.0, 0.0};  // y=0, x=1, y=1, x=0
    const std::size_t n = curve.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = curve.pts[i];
        const Vec2 b = curve.pts[(i + 1) % n];
        if (std::abs(a.y) <= eps && std::abs(b.y) <= eps) per_side[0] += std::abs(b.x - a.x);
        if (std::abs(a.x - 1.0) <= eps && std::abs(b.x - 1.0) <= eps)
            per_side[1] += std::abs(b.y - a.y);
        if (std::abs(a.y - 1.0) <= eps && std::abs(b.y - 1.0) <= eps)
            per_side[2] += std::abs(b.x - a.x);
        if (std::abs(a.x) <= eps && std::abs(b.x) <= eps) per_side[3] += std::abs(b.y - a.y);
    }
    return std::min(std::min(per_side[0], per_side[1]), std::min(per_side[2], per_side[3]));
}

// The predicted nested loop sequence of the scaling limit. Curves are
// indexed from first_index: 0 in the supercritical branch (alpha* > alpha_c),
// 1 in the subcritical branch where W_0 is empty.
struct LimitShape {
    int first_index = 0;
    std::vector<double> radii;
    std::vector<Polygon> curves;

    const Polygon* curve_at(int i) const {
        const int k = i - first_index;
        if (k < 0 || k >= static_cast<int>(curves.size())) return nullptr;
        return &curves[static_cast<std::size_t>(k)];
    }
    int last_index() const { return first_index + static_cast<int>(curves.size()) - 1; }
};

inline LimitShape predicted_ensemble(double alpha_star, double alpha_c,
                                     const std::vector<double>& radii,
                                     const SurfaceTension& tau, int K) {
    require(alpha_star != alpha_c,
            "predicted_ensemble: critical fractional height, no scaling limit");
    require(!radii.empty(), "predicted_ensemble: need at least one radius");
    for (double r : radii)
        require(r > 0.0 && r < 1.0, "predicted_ensemble: radii must lie strictly in (0, 1)");
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (std::size_t j = i + 1; j < radii.size(); ++j)
            require(std::abs(radii[i] - radii[j]) > 1e-12,
                    "predicted_ensemble: duplicate radii (degenerate: loops must be distinct)");
    const WulffBody body = wulff_body(tau, K);
    LimitShape out;
    out.first_index = alpha_star > alpha_c ? 0 : 1;
    out.radii = radii;
    out.curves.reserve(radii.size());
    for (double r : radii) out.curves.push_back(opening_boundary(dilate(body, r)));
    return out;
}

struct RadiusFit {
    double r = 0.0;
    double residual = 0.0;
};

// Estimate the dilation radius of an observed rescaled loop by golden-section
// minimization of the Hausdorff distance to the predicted opening curve.
inline RadiusFit fit_radius(const Polygon& observed, const SurfaceTension& tau, int K,
                            double resolution = 2e-3) {
    require(!observed.empty(), "fit_radius: empty observed loop");
    const WulffBody body = wulff_body(tau, K);
    const double wmax = std::max(body.half_extent_x(), body.half_extent_y());
    const double r_hi = std::min(1.0 - 1e-9, (0.5 - 1e-9) / wmax);
    const double r_lo = 1e-3;
    const auto cost = [&](double r) {
        return hausdorff_distance(observed, opening_boundary(dilate(body, r)), resolution);
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = r_lo, hi = r_hi;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = cost(x1), f2 = cost(x2);
    while (hi - lo > 1e-4) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = cost(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = cost(x2);
        }
    }
    const double r = 0.5 * (lo + hi);
    return RadiusFit{r, cost(r)};
}

}  // namespace sosim
