#pragma once

// Statistical experiments mapping sampled configurations to verdicts on the
// height-concentration, loop-census, shape-convergence, cube-root-fluctuation
// and exponent-cascade predictions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sosim/common.hpp"
#include "sosim/lattice.hpp"
#include "sosim/levellines.hpp"
#include "sosim/sampler.hpp"
#include "sosim/wulff.hpp"

namespace sosim {

// ---------------------------------------------------------------------------
// Height concentration (two-level dichotomy in alpha vs alpha_c)

struct ConcentrationReport {
    int L = 0;
    double beta = 0.0;
    double H = 0.0;
    double alpha = 0.0;
    double alpha_c = 0.0;
    int h_floor = 0;
    double threshold = 0.9;
    int n_samples = 0;
    std::vector<double> mean_height_fraction;  // index h = 0..cap
    double frac_E_floor = 0.0;
    double frac_E_floor_minus_1 = 0.0;
    double frac_union = 0.0;
    std::string predicted;  // "E_floor" | "E_floor_minus_1" | "near-critical"
};

class ConcentrationAccumulator {
  public:
    explicit ConcentrationAccumulator(const SimConfig& cfg)
        : cfg_(cfg),
          cap_(cfg.resolved_height_cap()),
          sums_(static_cast<std::size_t>(cfg.resolved_height_cap()) + 1, 0.0) {}

    void add(const HeightField& f) {
        const auto hist = height_histogram(f, cap_);
        const double n2 = static_cast<double>(cfg_.side_length) *
                          static_cast<double>(cfg_.side_length);
        const int hf = floor_H(cfg_.side_length, cfg_.beta);
        bool e_floor = false, e_below = false;
        for (int h = 0; h <= cap_; ++h) {
            const double frac = static_cast<double>(hist[static_cast<std::size_t>(h)]) / n2;
            sums_[static_cast<std::size_t>(h)] += frac;
            if (h == hf && frac >= cfg_.e_h_threshold) e_floor = true;
            if (h == hf - 1 && frac >= cfg_.e_h_threshold) e_below = true;
        }
        n_ += 1;
        n_e_floor_ += e_floor ? 1 : 0;
        n_e_below_ += e_below ? 1 : 0;
        n_union_ += (e_floor || e_below) ? 1 : 0;
    }

    ConcentrationReport report(std::optional<double> alpha_c_override = {}) const {
        require(n_ >= 1, "concentration_report: need at least one sample");
        ConcentrationReport r;
        r.L = cfg_.side_length;
        r.beta = cfg_.beta;
        r.H = H_of_L(r.L, r.beta);
        r.alpha = alpha_of_L(r.L, r.beta);
        r.alpha_c = alpha_c_override.value_or(alpha_c_approx(r.beta));
        r.h_floor = floor_H(r.L, r.beta);
        r.threshold = cfg_.e_h_threshold;
        r.n_samples = n_;
        r.mean_height_fraction.resize(sums_.size());
        for (std::size_t h = 0; h < sums_.size(); ++h)
            r.mean_height_fraction[h] = sums_[h] / static_cast<double>(n_);
        r.frac_E_floor = static_cast<double>(n_e_floor_) / static_cast<double>(n_);
        r.frac_E_floor_minus_1 = static_cast<double>(n_e_below_) / static_cast<double>(n_);
        r.frac_union = static_cast<double>(n_union_) / static_cast<double>(n_);
        if (r.alpha > r.alpha_c)
            r.predicted = "E_floor";
        else if (r.alpha < r.alpha_c)
            r.predicted = "E_floor_minus_1";
        else
            r.predicted = "near-critical";
        return r;
    }

  private:
    SimConfig cfg_;
    int cap_;
    std::vector<double> sums_;
    int n_ = 0;
    int n_e_floor_ = 0;
    int n_e_below_ = 0;
    int n_union_ = 0;
};

inline ConcentrationReport concentration_report(const std::vector<HeightField>& samples,
                                                const SimConfig& cfg,
                                                std::optional<double> alpha_c_override = {}) {
    ConcentrationAccumulator acc(cfg);
    for (const HeightField& f : samples) acc.add(f);
    return acc.report(alpha_c_override);
}

// ---------------------------------------------------------------------------
// Loop census (macroscopic loop counts per view, microscopic levels above)

struct CensusRow {
    bool micro_above_ok = true;      // no macroscopic loop above floor(H)
    bool single_per_view_ok = true;  // exactly one loop in every view i >= 1
    bool top_ok = true;              // view 0 empty or a single loop
    std::int64_t max_area_above = 0;
    std::vector<int> view_counts;
};

struct CensusReport {
    int n_samples = 0;
    int h_floor = 0;
    double cutoff = 0.0;
    double rate_micro_above = 0.0;
    double rate_single_per_view = 0.0;
    double rate_top = 0.0;
    std::vector<double> mean_view_counts;
    std::vector<std::int64_t> max_area_above;  // per sample
    std::vector<CensusRow> rows;
};

inline CensusRow census_row(const LoopEnsemble& en) {
    CensusRow row;
    for (int h = en.h_floor + 1; h <= en.max_level(); ++h) {
        for (const LevelLoop& lp : en.level(std::max(h, 1))) {
            row.max_area_above = std::max(row.max_area_above, lp.area);
            if (lp.macroscopic) row.micro_above_ok = false;
        }
    }
    const int n_views = static_cast<int>(en.views.size());
    row.view_counts.resize(static_cast<std::size_t>(std::max(n_views, 0)));
    for (int i = 0; i < n_views; ++i) {
        const int c = static_cast<int>(en.view(i).size());
        row.view_counts[static_cast<std::size_t>(i)] = c;
        if (i == 0) {
            if (c > 1) row.top_ok = false;
        } else if (c != 1) {
            row.single_per_view_ok = false;
        }
    }
    return row;
}

inline CensusReport loop_census(const std::vector<LoopEnsemble>& ensembles) {
    require(!ensembles.empty(), "loop_census: need at least one ensemble");
    CensusReport rep;
    rep.n_samples = static_cast<int>(ensembles.size());
    rep.h_floor = ensembles.front().h_floor;
    rep.cutoff = ensembles.front().cutoff;
    std::size_t max_views = 0;
    for (const auto& en : ensembles) max_views = std::max(max_views, en.views.size());
    std::vector<double> count_sums(max_views, 0.0);
    int ok_micro = 0, ok_single = 0, ok_top = 0;
    for (const auto& en : ensembles) {
        CensusRow row = census_row(en);
        ok_micro += row.micro_above_ok ? 1 : 0;
        ok_single += row.single_per_view_ok ? 1 : 0;
        ok_top += row.top_ok ? 1 : 0;
        for (std::size_t i = 0; i < row.view_counts.size(); ++i)
            count_sums[i] += row.view_counts[i];
        rep.max_area_above.push_back(row.max_area_above);
        rep.rows.push_back(std::move(row));
    }
    const double n = static_cast<double>(rep.n_samples);
    rep.rate_micro_above = ok_micro / n;
    rep.rate_single_per_view = ok_single / n;
    rep.rate_top = ok_top / n;
    rep.mean_view_counts.resize(max_views);
    for (std::size_t i = 0; i < max_views; ++i) rep.mean_view_counts[i] = count_sums[i] / n;
    return rep;
}

// ---------------------------------------------------------------------------
// Shape convergence (per-index Hausdorff distances to a limit shape)

struct ShapeDistanceTable {
    std::vector<int> indices;
    std::vector<std::vector<double>> distances;  // [index][sample], inf on mismatch
    std::vector<double> per_sample_sup;
    int n_mismatches = 0;
};

inline ShapeDistanceTable shape_convergence(const std::vector<LoopEnsemble>& ensembles,
                                            const LimitShape& limit, int L,
                                            double resolution = 2e-3) {
    require(!limit.curves.empty(), "shape_convergence: empty limit shape");
    require(!ensembles.empty(), "shape_convergence: no ensembles");
    ShapeDistanceTable tab;
    int max_i = limit.last_index();
    for (const auto& en : ensembles)
        max_i = std::max(max_i, static_cast<int>(en.views.size()) - 1);
    for (int i = 0; i <= max_i; ++i) tab.indices.push_back(i);
    tab.distances.assign(tab.indices.size(), {});
    const double inv_l = 1.0 / static_cast<double>(L);

    for (const auto& en : ensembles) {
        double sup = 0.0;
        for (int i = 0; i <= max_i; ++i) {
            const auto loops = en.view(i);
            const Polygon* w = limit.curve_at(i);
            double d;
            if (loops.empty() && w == nullptr) {
                continue;  // absent on both sides: no contribution
            } else if (loops.empty() || w == nullptr) {
                d = std::numeric_limits<double>::infinity();
                ++tab.n_mismatches;
            } else {
                // Hausdorff between the union of rescaled loops and W_i.
                std::vector<Polygon> rescaled;
                rescaled.reserve(loops.size());
                for (const LevelLoop* lp : loops) {
                    Polygon p = lp->to_polygon();
                    for (Vec2& v : p.pts) v = inv_l * v;
                    rescaled.push_back(std::move(p));
                }
                double to_w = 0.0;
                for (const Polygon& p : rescaled)
                    to_w = std::max(to_w, directed_hausdorff(densify(p, resolution), *w));
                double from_w = 0.0;
                for (const Vec2& s : densify(*w, resolution)) {
                    double best = std::numeric_limits<double>::infinity();
                    for (const Polygon& p : rescaled)
                        best = std::min(best, directed_hausdorff({s}, p));
                    from_w = std::max(from_w, best);
                }
                d = std::max(to_w, from_w);
            }
            tab.distances[static_cast<std::size_t>(i)].push_back(d);
            sup = std::max(sup, d);
        }
        tab.per_sample_sup.push_back(sup);
    }
    return tab;
}

// ---------------------------------------------------------------------------
// Boundary fluctuations (Theorem-3 statistic and the exponent cascade)

struct FluctuationReport {
    int L = 0;
    int n_samples = 0;
    int n_excluded = 0;  // samples with no macroscopic top loop
    std::vector<double> sup_rho;
    double mean = 0.0;
    double median = 0.0;
};

inline FluctuationReport fluctuation_report_from(const std::vector<std::optional<double>>& sups,
                                                 int L) {
    FluctuationReport r;
    r.L = L;
    for (const auto& s : sups) {
        ++r.n_samples;
        if (s)
            r.sup_rho.push_back(*s);
        else
            ++r.n_excluded;
    }
    if (!r.sup_rho.empty()) {
        double total = 0.0;
        for (double v : r.sup_rho) total += v;
        r.mean = total / static_cast<double>(r.sup_rho.size());
        std::vector<double> sorted = r.sup_rho;
        std::sort(sorted.begin(), sorted.end());
        r.median = sorted[sorted.size() / 2];
    }
    return r;
}

// sup rho over the central window for view i of each ensemble.
inline std::vector<std::optional<double>> sup_rho_per_sample(
    const std::vector<LoopEnsemble>& ensembles, int view_index) {
    std::vector<std::optional<double>> out;
    out.reserve(ensembles.size());
    for (const auto& en : ensembles)
        out.push_back(sup_rho_central(en.view(view_index), en.L));
    return out;
}

inline FluctuationReport fluctuation_stats(const std::vector<LoopEnsemble>& ensembles, int L) {
    require(!ensembles.empty(), "fluctuation_stats: no ensembles");
    return fluctuation_report_from(sup_rho_per_sample(ensembles, 0), L);
}

struct ExponentFit {
    double exponent = 0.0;
    double intercept = 0.0;  // log prefactor
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    int n_boot = 0;
    std::vector<double> Ls;
    std::vector<double> mean_sup_rho;
};

// Log-log least squares of mean sup-rho against L, with a bootstrap CI
// obtained by resampling within each L. Deterministic for fixed inputs.
inline ExponentFit fit_exponent(const std::vector<std::pair<double, std::vector<double>>>& sweep,
                                int n_boot = 1000, std::uint64_t boot_seed = 0x5eedf17u) {
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        bool dup = false;
        for (std::size_t j = 0; j < i; ++j) dup = dup || sweep[j].first == sweep[i].first;
        if (!dup) ++distinct;
    }
    require(distinct >= 3, "fit_exponent: need >= 3 distinct L values");
    for (const auto& [L, v] : sweep)
        require(!v.empty(), "fit_exponent: empty sample set at some L");

    const auto slope_of = [](const std::vector<double>& lx, const std::vector<double>& ly,
                             double* intercept) {
        const std::size_t n = lx.size();
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        const double nn = static_cast<double>(n);
        const double denom = nn * sxx - sx * sx;
        const double slope = (nn * sxy - sx * sy) / denom;
        if (intercept) *intercept = (sy - slope * sx) / nn;
        return slope;
    };

    ExponentFit fit;
    std::vector<double> lx, ly;
    for (const auto& [L, v] : sweep) {
        double m = 0.0;
        for (double s : v) m += s;
        m /= static_cast<double>(v.size());
        fit.Ls.push_back(L);
        fit.mean_sup_rho.push_back(m);
        require(m > 0.0, "fit_exponent: nonpositive mean sup-rho");
        lx.push_back(std::log(L));
        ly.push_back(std::log(m));
    }
    fit.exponent = slope_of(lx, ly, &fit.intercept);

    std::mt19937_64 eng(boot_seed);
    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(n_boot));
    for (int b = 0; b < n_boot; ++b) {
        std::vector<double> by;
        for (const auto& [L, v] : sweep) {
            double m = 0.0;
            for (std::size_t k = 0; k < v.size(); ++k)
                m += v[eng() % v.size()];
            m /= static_cast<double>(v.size());
            by.push_back(std::log(m));
        }
        slopes.push_back(slope_of(lx, by, nullptr));
    }
    std::sort(slopes.begin(), slopes.end());
    fit.n_boot = n_boot;
    if (!slopes.empty()) {
        const auto pick = [&](double q) {
            const double pos = q * static_cast<double>(slopes.size() - 1);
            return slopes[static_cast<std::size_t>(std::llround(pos))];
        };
        fit.ci_lo = pick(0.025);
        fit.ci_hi = pick(0.975);
    }
    return fit;
}

struct CascadeReport {
    double xi = 0.0;
    int level_index = 0;   // i = floor(xi * H)
    int level_height = 0;  // floor(H) - i
    double epsilon = 0.0;
    double threshold = 0.0;  // L^((1-xi)/3 + eps)
    int n_samples = 0;
    int n_excluded = 0;
    int n_exceed = 0;
    std::vector<double> sup_rho;

    double exceed_rate() const {
        const int n = n_samples - n_excluded;
        return n > 0 ? static_cast<double>(n_exceed) / static_cast<double>(n) : 0.0;
    }
};

// Fluctuation of the i-th level line, i = floor(xi H); at i = 0 this reduces
// to the Theorem-3 statistic with its L^{1/3+eps} threshold.
inline CascadeReport cascade_stats(const std::vector<LoopEnsemble>& ensembles, double xi,
                                   int L, double beta, double epsilon = 0.05) {
    require(!ensembles.empty(), "cascade_stats: no ensembles");
    require(xi >= 0.0 && xi < 1.0, "cascade_stats: xi must lie in [0, 1)");
    CascadeReport rep;
    rep.xi = xi;
    rep.epsilon = epsilon;
    rep.level_index = static_cast<int>(std::floor(xi * H_of_L(L, beta)));
    rep.level_height = floor_H(L, beta) - rep.level_index;
    rep.threshold = std::pow(static_cast<double>(L), (1.0 - xi) / 3.0 + epsilon);
    for (const auto& s : sup_rho_per_sample(ensembles, rep.level_index)) {
        ++rep.n_samples;
        if (!s) {
            ++rep.n_excluded;
            continue;
        }
        rep.sup_rho.push_back(*s);
        if (*s > rep.threshold) ++rep.n_exceed;
    }
    return rep;
}

}  // namespace sosim
