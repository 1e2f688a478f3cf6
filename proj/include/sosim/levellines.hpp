#pragma once

// Exact extraction of the h-level-line loop ensemble of a height field.
// A dual bond belongs to level h iff its primal bond (x, y) has
// eta_x >= h > eta_y or vice versa; the resulting even-degree edge set is
// split into edge-disjoint closed loops, resolving every degree-4 dual
// vertex along the NW-oriented diagonal: North pairs with East, South
// with West.
//
// Dual vertices are indexed by integers (u, v) in [0, L]^2 and sit at
// geometric coordinates (u + 1/2, v + 1/2); cell (x, y) of the field spans
// dual vertices [x, x+1] x [y, y+1].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "sosim/common.hpp"
#include "sosim/geometry.hpp"
#include "sosim/lattice.hpp"

namespace sosim {

struct DualEdgeSet {
    int L = 0;
    int level = 0;
    // vert[u * L + v]: edge (u, v)-(u, v+1), u in [0, L], v in [0, L-1]
    // horz[u * (L+1) + v]: edge (u, v)-(u+1, v), u in [0, L-1], v in [0, L]
    std::vector<std::uint8_t> vert;
    std::vector<std::uint8_t> horz;

    bool v_at(int u, int v) const {
        return vert[static_cast<std::size_t>(u) * L + static_cast<std::size_t>(v)] != 0;
    }
    bool h_at(int u, int v) const {
        return horz[static_cast<std::size_t>(u) * (L + 1) + static_cast<std::size_t>(v)] != 0;
    }

    int degree(int u, int v) const {
        int d = 0;
        if (v < L && v_at(u, v)) ++d;          // North
        if (v > 0 && v_at(u, v - 1)) ++d;      // South
        if (u < L && h_at(u, v)) ++d;          // East
        if (u > 0 && h_at(u - 1, v)) ++d;      // West
        return d;
    }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (std::uint8_t e : vert) n += e;
        for (std::uint8_t e : horz) n += e;
        return n;
    }
};

inline DualEdgeSet edge_set(const HeightField& f, int h) {
    require(h >= 1, "edge_set: level must be >= 1");
    const int L = f.side();
    DualEdgeSet es;
    es.L = L;
    es.level = h;
    es.vert.assign(static_cast<std::size_t>(L + 1) * L, 0);
    es.horz.assign(static_cast<std::size_t>(L) * (L + 1), 0);
    for (int u = 0; u <= L; ++u) {
        for (int v = 0; v < L; ++v) {
            const bool a = f.at_or_zero(u - 1, v) >= h;
            const bool b = f.at_or_zero(u, v) >= h;
            es.vert[static_cast<std::size_t>(u) * L + v] = (a != b) ? 1 : 0;
        }
    }
    for (int u = 0; u < L; ++u) {
        for (int v = 0; v <= L; ++v) {
            const bool a = f.at_or_zero(u, v - 1) >= h;
            const bool b = f.at_or_zero(u, v) >= h;
            es.horz[static_cast<std::size_t>(u) * (L + 1) + v] = (a != b) ? 1 : 0;
        }
    }
    return es;
}

// One closed level-line loop. Vertices are dual indices (geometric position
// = index + 1/2 in both coordinates), stored with first == last. Loops are
// traced counterclockwise, so twice_area > 0 and area counts enclosed unit
// cells exactly (pinch vertices may repeat inside the ring).
struct LevelLoop {
    int level = 0;
    int sign = 0;  // +1: cells just inside are >= level; -1: a hole
    int length = 0;
    std::int64_t area = 0;
    bool macroscopic = false;
    std::vector<std::array<int, 2>> verts;  // dual indices, first == last

    Polygon to_polygon() const {
        Polygon p;
        p.pts.reserve(verts.size() - 1);
        for (std::size_t i = 0; i + 1 < verts.size(); ++i)
            p.pts.push_back({static_cast<double>(verts[i][0]) + 0.5,
                             static_cast<double>(verts[i][1]) + 0.5});
        return p;
    }

    // Dual-index polygon (no +1/2 shift); cheaper for containment tests.
    Polygon to_index_polygon() const {
        Polygon p;
        p.pts.reserve(verts.size() - 1);
        for (std::size_t i = 0; i + 1 < verts.size(); ++i)
            p.pts.push_back(
                {static_cast<double>(verts[i][0]), static_cast<double>(verts[i][1])});
        return p;
    }
};

namespace detail {

enum Slot : int { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };

inline int partner_slot(int s) {
    switch (s) {
        case kNorth: return kEast;
        case kEast: return kNorth;
        case kSouth: return kWest;
        default: return kSouth;
    }
}

inline int opposite_slot(int s) { return (s + 2) & 3; }

struct EdgeRef {
    bool vertical;
    int u, v;
};

// Edge leaving vertex (u, v) through `slot`, as a storage reference.
inline EdgeRef slot_edge(int u, int v, int slot) {
    switch (slot) {
        case kNorth: return {true, u, v};
        case kSouth: return {true, u, v - 1};
        case kEast: return {false, u, v};
        default: return {false, u - 1, v};
    }
}

inline bool slot_present(const DualEdgeSet& es, int u, int v, int slot) {
    switch (slot) {
        case kNorth: return v < es.L && es.v_at(u, v);
        case kSouth: return v > 0 && es.v_at(u, v - 1);
        case kEast: return u < es.L && es.h_at(u, v);
        default: return u > 0 && es.h_at(u - 1, v);
    }
}

}  // namespace detail

// Partition an even-degree dual edge set into closed loops under the
// NW-splitting rule. Signs are recovered from the edge set alone: the cell
// just east of a loop's leftmost-lowest vertical edge lies in {eta >= h}
// iff a westward ray from it crosses an odd number of set edges.
inline std::vector<LevelLoop> trace_loops(const DualEdgeSet& es) {
    using namespace detail;
    const int L = es.L;
    std::vector<std::uint8_t> vvis(es.vert.size(), 0);
    std::vector<std::uint8_t> hvis(es.horz.size(), 0);
    std::vector<LevelLoop> loops;

    const auto visited = [&](const EdgeRef& e) -> std::uint8_t& {
        return e.vertical ? vvis[static_cast<std::size_t>(e.u) * L + e.v]
                          : hvis[static_cast<std::size_t>(e.u) * (L + 1) + e.v];
    };

    for (int u = 0; u <= L; ++u) {
        for (int v = 0; v < L; ++v) {
            if (!es.v_at(u, v) || vvis[static_cast<std::size_t>(u) * L + v]) continue;

            // Start edge is this loop's leftmost-lowest vertical edge; the
            // loop interior lies east of it, so walking north traces CCW.
            LevelLoop loop;
            loop.level = es.level;
            int cu = u, cv = v;
            int slot = kNorth;
            loop.verts.push_back({cu, cv});
            std::int64_t twice_area = 0;
            do {
                const EdgeRef e = slot_edge(cu, cv, slot);
                check_invariant(slot_present(es, cu, cv, slot) && !visited(e),
                                "trace_loops: walk hit a missing or reused edge");
                visited(e) = 1;
                int nu = cu, nv = cv;
                switch (slot) {
                    case kNorth: ++nv; break;
                    case kSouth: --nv; break;
                    case kEast: ++nu; break;
                    default: --nu; break;
                }
                twice_area += static_cast<std::int64_t>(cu) * nv -
                              static_cast<std::int64_t>(nu) * cv;
                loop.verts.push_back({nu, nv});
                const int in_slot = opposite_slot(slot);
                const int deg = es.degree(nu, nv);
                int exit_slot;
                if (deg == 2) {
                    exit_slot = -1;
                    for (int s = 0; s < 4; ++s) {
                        if (s != in_slot && slot_present(es, nu, nv, s)) {
                            exit_slot = s;
                            break;
                        }
                    }
                    check_invariant(exit_slot >= 0, "trace_loops: dangling edge");
                } else {
                    check_invariant(deg == 4, "trace_loops: odd vertex degree");
                    exit_slot = partner_slot(in_slot);
                }
                cu = nu;
                cv = nv;
                slot = exit_slot;
            } while (!(cu == u && cv == v && slot == kNorth));

            check_invariant(twice_area > 0 && twice_area % 2 == 0,
                            "trace_loops: loop is not a CCW cell boundary");
            loop.area = twice_area / 2;
            loop.length = static_cast<int>(loop.verts.size()) - 1;

            // Membership parity of the cell (u, v) east of the start edge.
            int crossings = 0;
            for (int uu = 0; uu <= u; ++uu)
                if (es.v_at(uu, v)) ++crossings;
            loop.sign = (crossings % 2 == 1) ? +1 : -1;
            loops.push_back(std::move(loop));
        }
    }
    return loops;
}

inline std::vector<LevelLoop> extract_level(const HeightField& f, int h) {
    return trace_loops(edge_set(f, h));
}

inline double macroscopic_cutoff(int L) {
    const double lnL = std::log(static_cast<double>(L));
    return lnL * lnL;
}

// All level lines of a configuration, plus the macroscopic views
// script-L_i = macroscopic loops at height floor(H) - i.
struct LoopEnsemble {
    int L = 0;
    double beta = 0.0;
    int h_floor = 0;
    double cutoff = 0.0;
    std::vector<std::vector<LevelLoop>> by_level;  // index h-1, h = 1..max
    std::vector<std::vector<std::size_t>> views;   // views[i] -> indices into by_level[h_floor-i-1]

    int max_level() const { return static_cast<int>(by_level.size()); }

    const std::vector<LevelLoop>& level(int h) const {
        return by_level[static_cast<std::size_t>(h - 1)];
    }

    // Macroscopic loops of view i (height h_floor - i); empty when absent.
    std::vector<const LevelLoop*> view(int i) const {
        std::vector<const LevelLoop*> out;
        if (i < 0 || i >= static_cast<int>(views.size())) return out;
        const int h = h_floor - i;
        for (std::size_t ix : views[static_cast<std::size_t>(i)])
            out.push_back(&by_level[static_cast<std::size_t>(h - 1)][ix]);
        return out;
    }
};

inline LoopEnsemble extract_ensemble(const HeightField& f, double beta) {
    const int L = f.side();
    LoopEnsemble en;
    en.L = L;
    en.beta = beta;
    en.h_floor = floor_H(L, beta);
    en.cutoff = macroscopic_cutoff(L);
    const int max_h = f.max_height();
    en.by_level.resize(static_cast<std::size_t>(max_h));
    for (int h = 1; h <= max_h; ++h) {
        auto loops = extract_level(f, h);
        for (LevelLoop& lp : loops)
            lp.macroscopic = static_cast<double>(lp.area) >= en.cutoff;
        en.by_level[static_cast<std::size_t>(h - 1)] = std::move(loops);
    }
    const int n_views = std::max(en.h_floor, 0);
    en.views.resize(static_cast<std::size_t>(n_views));
    for (int i = 0; i < n_views; ++i) {
        const int h = en.h_floor - i;
        if (h < 1 || h > max_h) continue;
        const auto& lv = en.by_level[static_cast<std::size_t>(h - 1)];
        for (std::size_t k = 0; k < lv.size(); ++k)
            if (lv[k].macroscopic) en.views[static_cast<std::size_t>(i)].push_back(k);
    }
    return en;
}

// Containment forest over all loops of an ensemble: parent = smallest-area
// loop strictly containing the child's representative interior cell.
struct NestingForest {
    struct Node {
        int level;
        std::size_t index_in_level;
        int parent;  // -1 for roots
    };
    std::vector<Node> nodes;
};

namespace detail {

// Center of the cell just east of the loop's leftmost-lowest vertical edge,
// in dual-index coordinates; always strictly inside the loop.
inline Vec2 interior_representative(const LevelLoop& lp) {
    int bu = std::numeric_limits<int>::max();
    int bv = std::numeric_limits<int>::max();
    for (std::size_t i = 0; i + 1 < lp.verts.size(); ++i) {
        const auto& a = lp.verts[i];
        const auto& b = lp.verts[i + 1];
        if (a[0] == b[0]) {  // vertical edge
            const int vv = std::min(a[1], b[1]);
            if (a[0] < bu || (a[0] == bu && vv < bv)) {
                bu = a[0];
                bv = vv;
            }
        }
    }
    return {static_cast<double>(bu) + 0.5, static_cast<double>(bv) + 0.5};
}

}  // namespace detail

inline NestingForest nesting_forest(const LoopEnsemble& en) {
    NestingForest f;
    std::vector<const LevelLoop*> all;
    for (int h = 1; h <= en.max_level(); ++h) {
        const auto& lv = en.level(h);
        for (std::size_t k = 0; k < lv.size(); ++k) {
            f.nodes.push_back({h, k, -1});
            all.push_back(&lv[k]);
        }
    }
    std::vector<Polygon> polys;
    polys.reserve(all.size());
    for (const LevelLoop* lp : all) polys.push_back(lp->to_index_polygon());
    for (std::size_t i = 0; i < all.size(); ++i) {
        const Vec2 rep = detail::interior_representative(*all[i]);
        int best = -1;
        for (std::size_t j = 0; j < all.size(); ++j) {
            if (j == i || all[j]->area <= all[i]->area) continue;
            if (!point_in_polygon(rep, polys[j])) continue;
            if (best < 0 || all[j]->area < all[static_cast<std::size_t>(best)]->area)
                best = static_cast<int>(j);
        }
        f.nodes[i].parent = best;
    }
    return f;
}

// Vertical fluctuation profile: rho(x) = min{y : (x, y) on the loops}.
// Minima occur either at dual vertex columns (x = u + 1/2) or strictly
// inside horizontal edges (integer x), so both families are tracked.
struct RhoProfile {
    int L = 0;
    std::vector<int> min_v_half;  // index u = 0..L, column x = u + 1/2; INT_MAX if absent
    std::vector<int> min_v_int;   // index u = 0..L-1, column x = u + 1;   INT_MAX if absent
};

inline RhoProfile rho_profile(const std::vector<const LevelLoop*>& loops, int L) {
    RhoProfile p;
    p.L = L;
    p.min_v_half.assign(static_cast<std::size_t>(L) + 1, std::numeric_limits<int>::max());
    p.min_v_int.assign(static_cast<std::size_t>(L), std::numeric_limits<int>::max());
    for (const LevelLoop* lp : loops) {
        const auto& vs = lp->verts;
        for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
            const int u = vs[i][0], v = vs[i][1];
            auto& mh = p.min_v_half[static_cast<std::size_t>(u)];
            if (v < mh) mh = v;
            if (vs[i + 1][1] == v && vs[i + 1][0] != u) {  // horizontal edge
                const int lo = std::min(u, vs[i + 1][0]);
                auto& mi = p.min_v_int[static_cast<std::size_t>(lo)];
                if (v < mi) mi = v;
            }
        }
    }
    return p;
}

// rho at an arbitrary geometric column; absent when the loop does not
// reach that column.
inline std::optional<double> rho(const LevelLoop& lp, double x) {
    double best = std::numeric_limits<double>::infinity();
    const auto& vs = lp.verts;
    for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
        const double ax = static_cast<double>(vs[i][0]) + 0.5;
        const double ay = static_cast<double>(vs[i][1]) + 0.5;
        const double bx = static_cast<double>(vs[i + 1][0]) + 0.5;
        const double by = static_cast<double>(vs[i + 1][1]) + 0.5;
        if (ax == bx) {
            if (ax == x) best = std::min(best, std::min(ay, by));
        } else {
            if (x >= std::min(ax, bx) && x <= std::max(ax, bx)) best = std::min(best, ay);
        }
    }
    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

// sup of rho over columns x in [L/4, 3L/4]; columns the loops do not reach
// are skipped. Absent when no column in the window is covered.
inline std::optional<double> sup_rho_central(const std::vector<const LevelLoop*>& loops,
                                             int L) {
    if (loops.empty()) return std::nullopt;
    const RhoProfile p = rho_profile(loops, L);
    const double lo = static_cast<double>(L) / 4.0;
    const double hi = 3.0 * static_cast<double>(L) / 4.0;
    double best = -1.0;
    for (int u = 0; u <= L; ++u) {
        const double x = static_cast<double>(u) + 0.5;
        if (x < lo || x > hi) continue;
        const int mv = p.min_v_half[static_cast<std::size_t>(u)];
        if (mv == std::numeric_limits<int>::max()) continue;
        best = std::max(best, static_cast<double>(mv) + 0.5);
    }
    for (int u = 0; u < L; ++u) {
        const double x = static_cast<double>(u) + 1.0;
        if (x < lo || x > hi) continue;
        const int mv = p.min_v_int[static_cast<std::size_t>(u)];
        if (mv == std::numeric_limits<int>::max()) continue;
        best = std::max(best, static_cast<double>(mv) + 0.5);
    }
    if (best < 0.0) return std::nullopt;
    return best;
}

}  // namespace sosim
