#pragma once

// Markov chain Monte Carlo for the wall-constrained SOS Gibbs measure:
// systematic-scan single-site heat bath with exact conditionals, a
// brute-force enumeration oracle for tiny boxes, and a monotone coupling
// that realizes stochastic domination between ordered configurations.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "sosim/common.hpp"
#include "sosim/lattice.hpp"

namespace sosim {

struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    // One uniform in [0, 1) per site update; 53-bit resolution.
    double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
};

// Precomputed exp(-beta k) table driving the single-site conditional law
// p(h) ~ exp(-beta sum_i |h - n_i|) over h in {0..cap}. Weights are shifted
// by the minimal bond sum so the largest weight is exactly 1, which keeps
// the table usable at arbitrarily large beta.
class HeatBath {
  public:
    HeatBath(double beta, int cap) : beta_(beta), cap_(cap) {
        require(beta > 0.0, "HeatBath: beta must be > 0");
        require(cap >= 1 && cap <= 255, "HeatBath: cap must lie in [1, 255]");
        exp_.resize(static_cast<std::size_t>(4 * cap) + 1);
        for (std::size_t k = 0; k < exp_.size(); ++k)
            exp_[k] = std::exp(-beta * static_cast<double>(k));
    }

    double beta() const { return beta_; }
    int cap() const { return cap_; }

    // Bond sums S(h) = sum_i |h - n_i| for h = 0..cap, computed incrementally:
    // S(h+1) = S(h) + 2 #{n_i <= h} - 4.
    void bond_sums(const std::array<int, 4>& nbr, int* s) const {
        int occ[256] = {};
        int sum = 0;
        for (int n : nbr) {
            ++occ[n];
            sum += n;
        }
        int below = 0;
        for (int h = 0; h <= cap_; ++h) {
            s[h] = sum;
            below += occ[h];
            sum += 2 * below - 4;
        }
    }

    // Inverse-CDF draw given the four neighbor heights and a uniform u in [0,1).
    // A single code path serves the sweep, the public weights op and the
    // monotone coupling, so their conditional laws agree bit for bit.
    int sample(const std::array<int, 4>& nbr, double u) const {
        int s[256];
        bond_sums(nbr, s);
        int smin = s[0];
        for (int h = 1; h <= cap_; ++h)
            if (s[h] < smin) smin = s[h];
        double cum[256];
        double total = 0.0;
        for (int h = 0; h <= cap_; ++h) {
            total += exp_[static_cast<std::size_t>(s[h] - smin)];
            cum[h] = total;
        }
        const double target = u * total;
        for (int h = 0; h < cap_; ++h)
            if (target < cum[h]) return h;
        return cap_;
    }

  private:
    double beta_;
    int cap_;
    std::vector<double> exp_;
};

// Normalized single-site conditional distribution; strictly positive entries.
inline std::vector<double> heat_bath_weights(const std::array<int, 4>& nbr, double beta,
                                             int cap) {
    for (int n : nbr)
        require(n >= 0 && n <= cap, "heat_bath_weights: neighbor height out of [0, cap]");
    const HeatBath hb(beta, cap);
    int s[256];
    hb.bond_sums(nbr, s);
    int smin = s[0];
    for (int h = 1; h <= cap; ++h)
        if (s[h] < smin) smin = s[h];
    std::vector<double> w(static_cast<std::size_t>(cap) + 1);
    double total = 0.0;
    for (int h = 0; h <= cap; ++h) {
        w[h] = std::exp(-beta * static_cast<double>(s[h] - smin));
        total += w[h];
    }
    for (double& x : w) x /= total;
    return w;
}

struct ChainState {
    SimConfig cfg;  // height_cap resolved
    HeightField field;
    Rng rng;
    HeatBath bath;
    std::int64_t sweep_count = 0;
    std::int64_t cap_hits = 0;
    std::int64_t site_updates = 0;
};

inline ChainState make_chain(const SimConfig& cfg, int start_level) {
    validate_config(cfg);
    SimConfig r = cfg;
    r.height_cap = cfg.resolved_height_cap();
    return ChainState{r, new_field(r, start_level), Rng(r.seed), HeatBath(r.beta, r.height_cap)};
}

namespace detail {

inline void sweep_with(ChainState& st, Rng& rng) {
    const int L = st.cfg.side_length;
    const int cap = st.cfg.height_cap;
    HeightField& f = st.field;
    for (int y = 0; y < L; ++y) {
        for (int x = 0; x < L; ++x) {
            const std::array<int, 4> nbr = {f.at_or_zero(x - 1, y), f.at_or_zero(x + 1, y),
                                            f.at_or_zero(x, y - 1), f.at_or_zero(x, y + 1)};
            const int h = st.bath.sample(nbr, rng.uniform());
            f.set(x, y, h);
            if (h == cap) ++st.cap_hits;
        }
    }
    ++st.sweep_count;
    st.site_updates += static_cast<std::int64_t>(L) * L;
}

}  // namespace detail

// One systematic row-major scan; every site resampled from its exact
// conditional, one uniform consumed per site.
inline void sweep(ChainState& st) { detail::sweep_with(st, st.rng); }

// Coupled sweep of two pointwise-ordered chains driven by one shared uniform
// stream. The SOS conditional CDFs are stochastically ordered in the neighbor
// heights, so inverse-CDF sampling preserves low <= high at every site.
inline void monotone_coupled_sweep(ChainState& low, ChainState& high, Rng& shared) {
    require(low.cfg.side_length == high.cfg.side_length &&
                low.cfg.height_cap == high.cfg.height_cap && low.cfg.beta == high.cfg.beta,
            "monotone_coupled_sweep: chains must share (L, cap, beta)");
    const int L = low.cfg.side_length;
    const int cap = low.cfg.height_cap;
    for (int i = 0; i < L * L; ++i)
        require(low.field.raw()[static_cast<std::size_t>(i)] <=
                    high.field.raw()[static_cast<std::size_t>(i)],
                "monotone_coupled_sweep: fields are not pointwise ordered");
    HeightField& fl = low.field;
    HeightField& fh = high.field;
    for (int y = 0; y < L; ++y) {
        for (int x = 0; x < L; ++x) {
            const double u = shared.uniform();
            const std::array<int, 4> nl = {fl.at_or_zero(x - 1, y), fl.at_or_zero(x + 1, y),
                                           fl.at_or_zero(x, y - 1), fl.at_or_zero(x, y + 1)};
            const std::array<int, 4> nh = {fh.at_or_zero(x - 1, y), fh.at_or_zero(x + 1, y),
                                           fh.at_or_zero(x, y - 1), fh.at_or_zero(x, y + 1)};
            const int hl = low.bath.sample(nl, u);
            const int hh = high.bath.sample(nh, u);
            fl.set(x, y, hl);
            fh.set(x, y, hh);
            if (hl == cap) ++low.cap_hits;
            if (hh == cap) ++high.cap_hits;
        }
    }
    ++low.sweep_count;
    ++high.sweep_count;
    low.site_updates += static_cast<std::int64_t>(L) * L;
    high.site_updates += static_cast<std::int64_t>(L) * L;
}

struct SampleStats {
    std::int64_t cap_hits = 0;
    std::int64_t site_updates = 0;
    int start_level = 0;

    double cap_rate() const {
        return site_updates ? static_cast<double>(cap_hits) / static_cast<double>(site_updates)
                            : 0.0;
    }
    // Truncation audit: the height cap is a sampler device, not part of the
    // model, so hits must stay negligible.
    bool cap_warning() const { return cap_rate() > 1e-6; }
};

// Burn in, then visit n_samples fields separated by `thinning` sweeps.
// Default warm start is the predicted plateau floor(H(L)).
template <class Visitor>
SampleStats sample_visit(const SimConfig& cfg, int n_samples, int thinning,
                         std::optional<int> start_level, Visitor&& visit) {
    require(n_samples >= 1, "sample: n_samples must be >= 1");
    require(thinning >= 1, "sample: thinning must be >= 1");
    const int cap = cfg.resolved_height_cap();
    int start = start_level.value_or(std::max(floor_H(cfg.side_length, cfg.beta), 0));
    require(start >= 0 && start <= cap, "sample: start level outside [0, height_cap]");
    ChainState st = make_chain(cfg, start);
    for (std::int64_t s = 0; s < cfg.burn_in; ++s) sweep(st);
    for (int i = 0; i < n_samples; ++i) {
        for (int t = 0; t < thinning; ++t) sweep(st);
        visit(static_cast<const HeightField&>(st.field), i);
    }
    return SampleStats{st.cap_hits, st.site_updates, start};
}

struct SampleResult {
    std::vector<HeightField> fields;
    SampleStats stats;
};

inline SampleResult sample(const SimConfig& cfg, int n_samples, int thinning,
                           std::optional<int> start_level = {}) {
    SampleResult out;
    out.fields.reserve(static_cast<std::size_t>(n_samples));
    out.stats = sample_visit(cfg, n_samples, thinning, start_level,
                             [&](const HeightField& f, int) { out.fields.push_back(f); });
    return out;
}

// Exact finite-volume distribution of the truncated model, by brute force
// over all (cap+1)^(L^2) configurations.
struct ExactDistribution {
    int L = 0;
    int cap = 0;
    double beta = 0.0;
    double Z = 0.0;
    std::size_t n_configs = 0;
    bool has_config_table = false;                   // full table kept only for small spaces
    std::vector<double> config_prob;                 // indexed by base-(cap+1) encoding
    std::vector<std::int64_t> config_energy;         // parallel to config_prob
    std::vector<std::vector<double>> site_marginal;  // [y*L+x][h]

    std::size_t config_index(const HeightField& f) const {
        std::size_t ix = 0;
        const std::size_t base = static_cast<std::size_t>(cap) + 1;
        for (std::size_t i = f.raw().size(); i-- > 0;) ix = ix * base + f.raw()[i];
        return ix;
    }
};

inline ExactDistribution enumerate_exact(int L, int cap, double beta) {
    require(L >= 1, "enumerate_exact: L must be >= 1");
    require(cap >= 1 && cap <= 255, "enumerate_exact: cap must lie in [1, 255]");
    require(beta > 0.0, "enumerate_exact: beta must be > 0");
    const int n_sites = L * L;
    const double space = std::pow(static_cast<double>(cap) + 1.0, n_sites);
    require(space <= static_cast<double>(1 << 24),
            "enumerate_exact: state space exceeds 2^24 configurations");
    const std::size_t n_configs = static_cast<std::size_t>(std::llround(space));

    ExactDistribution out;
    out.L = L;
    out.cap = cap;
    out.beta = beta;
    out.n_configs = n_configs;
    out.has_config_table = n_configs <= (1u << 20);
    if (out.has_config_table) {
        out.config_prob.resize(n_configs);
        out.config_energy.resize(n_configs);
    }
    out.site_marginal.assign(static_cast<std::size_t>(n_sites),
                             std::vector<double>(static_cast<std::size_t>(cap) + 1, 0.0));

    HeightField f(L, 0);
    double Z = 0.0;
    for (std::size_t ix = 0;; ++ix) {
        const std::int64_t e = energy(f);
        const double w = std::exp(-beta * static_cast<double>(e));
        if (out.has_config_table) {
            out.config_energy[ix] = e;
            out.config_prob[ix] = w;  // normalized below
        }
        Z += w;
        for (int i = 0; i < n_sites; ++i)
            out.site_marginal[static_cast<std::size_t>(i)][f.raw()[static_cast<std::size_t>(i)]] += w;

        // odometer increment in base cap+1
        int pos = 0;
        while (pos < n_sites) {
            auto& v = f.raw()[static_cast<std::size_t>(pos)];
            if (v < cap) {
                ++v;
                break;
            }
            v = 0;
            ++pos;
        }
        if (pos == n_sites) break;
    }
    out.Z = Z;
    for (double& p : out.config_prob) p /= Z;
    for (auto& m : out.site_marginal)
        for (double& p : m) p /= Z;
    return out;
}

// Total-variation distance between empirical configuration counts and an
// exact probability table.
inline double total_variation(const std::vector<std::int64_t>& counts,
                              const std::vector<double>& prob) {
    require(counts.size() == prob.size(), "total_variation: size mismatch");
    std::int64_t n = 0;
    for (std::int64_t c : counts) n += c;
    require(n > 0, "total_variation: empty sample");
    double tv = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i)
        tv += std::abs(static_cast<double>(counts[i]) / static_cast<double>(n) - prob[i]);
    return 0.5 * tv;
}

}  // namespace sosim
