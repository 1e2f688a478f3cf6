#pragma once

// Height-field representation of the solid-on-solid surface over a wall:
// an L x L grid of nonnegative integer heights with zero boundary
// conditions, its Hamiltonian sum(|grad|) over nearest-neighbor bonds,
// and the entropic-repulsion height scale H(L) = ln(L) / (4 beta).

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sosim/common.hpp"

namespace sosim {

double H_of_L(int L, double beta);

struct SimConfig {
    int side_length = 16;
    double beta = 1.0;
    int height_cap = 0;  // 0 = auto: ceil(H(L)) + 5
    std::int64_t sweeps = 0;
    std::int64_t burn_in = 0;
    std::uint64_t seed = 1;
    double e_h_threshold = 0.9;

    int resolved_height_cap() const {
        if (height_cap > 0) return height_cap;
        const int cap = static_cast<int>(std::ceil(H_of_L(side_length, beta))) + 5;
        return cap < 1 ? 1 : cap;
    }
};

inline std::vector<std::string> config_violations(const SimConfig& c) {
    std::vector<std::string> v;
    if (c.side_length < 1) v.push_back("SimConfig.side_length: must be >= 1");
    if (!(c.beta > 0.0)) v.push_back("SimConfig.beta: must be > 0");
    if (c.height_cap < 0) v.push_back("SimConfig.height_cap: must be >= 1 (or 0 for auto)");
    if (c.height_cap == 0 || c.height_cap >= 1) {
        if (c.resolved_height_cap() > 255)
            v.push_back("SimConfig.height_cap: storage limit is 255");
    }
    if (c.sweeps < 0) v.push_back("SimConfig.sweeps: must be >= 0");
    if (c.burn_in < 0) v.push_back("SimConfig.burn_in: must be >= 0");
    if (!(c.e_h_threshold > 0.0 && c.e_h_threshold <= 1.0))
        v.push_back("SimConfig.e_h_threshold: must lie in (0, 1]");
    return v;
}

inline void validate_config(const SimConfig& c) {
    const auto v = config_violations(c);
    if (!v.empty()) throw std::invalid_argument(v.front());
}

// Heights are stored per site, 0-based (x, y) with x the column. Site (x, y)
// is the unit cell centered at (x + 1, y + 1), so dual-lattice vertices land
// on half-integer coordinates. Everything outside the box has height 0.
class HeightField {
  public:
    explicit HeightField(int L, int level = 0)
        : L_(L), h_(static_cast<std::size_t>(L) * static_cast<std::size_t>(L),
                    static_cast<std::uint8_t>(level)) {
        require(L >= 1, "HeightField: side length must be >= 1");
        require(level >= 0 && level <= 255, "HeightField: level out of range");
    }

    int side() const { return L_; }

    int at(int x, int y) const { return h_[idx(x, y)]; }

    int at_or_zero(int x, int y) const {
        if (x < 0 || y < 0 || x >= L_ || y >= L_) return 0;
        return h_[idx(x, y)];
    }

    void set(int x, int y, int v) { h_[idx(x, y)] = static_cast<std::uint8_t>(v); }

    int max_height() const {
        std::uint8_t m = 0;
        for (std::uint8_t v : h_)
            if (v > m) m = v;
        return m;
    }

    const std::vector<std::uint8_t>& raw() const { return h_; }
    std::vector<std::uint8_t>& raw() { return h_; }

    bool operator==(const HeightField& o) const = default;

  private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(L_) +
               static_cast<std::size_t>(x);
    }

    int L_;
    std::vector<std::uint8_t> h_;
};

inline HeightField new_field(const SimConfig& cfg, int initial_level) {
    validate_config(cfg);
    require(initial_level >= 0, "new_field: initial level must be >= 0");
    require(initial_level <= cfg.resolved_height_cap(),
            "new_field: initial level exceeds the height cap");
    return HeightField(cfg.side_length, initial_level);
}

// Hamiltonian sum_{x~y} |eta_x - eta_y|, bonds to the external zero layer included.
inline std::int64_t energy(const HeightField& f) {
    const int L = f.side();
    std::int64_t e = 0;
    for (int y = 0; y < L; ++y) {
        for (int x = 0; x < L; ++x) {
            const int h = f.at(x, y);
            e += std::abs(h - f.at_or_zero(x + 1, y));
            e += std::abs(h - f.at_or_zero(x, y + 1));
            if (x == 0) e += h;  // bond to the external zero column
            if (y == 0) e += h;  // bond to the external zero row
        }
    }
    return e;
}

// Energy change of setting site (x, y) to new_height; O(1) via the four neighbors.
inline int local_energy_delta(const HeightField& f, int x, int y, int new_height) {
    require(new_height >= 0 && new_height <= 255, "local_energy_delta: height out of range");
    const int old_h = f.at(x, y);
    const int n0 = f.at_or_zero(x - 1, y);
    const int n1 = f.at_or_zero(x + 1, y);
    const int n2 = f.at_or_zero(x, y - 1);
    const int n3 = f.at_or_zero(x, y + 1);
    const auto sum_abs = [&](int h) {
        return std::abs(h - n0) + std::abs(h - n1) + std::abs(h - n2) + std::abs(h - n3);
    };
    return sum_abs(new_height) - sum_abs(old_h);
}

inline double height_fraction(const HeightField& f, int h) {
    if (h < 0) return 0.0;
    const int L = f.side();
    std::int64_t count = 0;
    for (std::uint8_t v : f.raw())
        if (v == h) ++count;
    return static_cast<double>(count) / (static_cast<double>(L) * static_cast<double>(L));
}

inline std::vector<std::int64_t> height_histogram(const HeightField& f, int max_h) {
    std::vector<std::int64_t> hist(static_cast<std::size_t>(max_h) + 1, 0);
    for (std::uint8_t v : f.raw()) {
        if (v <= max_h) ++hist[v];
    }
    return hist;
}

inline double H_of_L(int L, double beta) {
    require(L >= 1, "H_of_L: L must be >= 1");
    require(beta > 0.0, "H_of_L: beta must be > 0");
    return std::log(static_cast<double>(L)) / (4.0 * beta);
}

inline double alpha_of_L(int L, double beta) {
    const double H = H_of_L(L, beta);
    return H - std::floor(H);
}

inline int floor_H(int L, double beta) {
    return static_cast<int>(std::floor(H_of_L(L, beta)));
}

// Leading-order critical fractional value ln(4 beta) / (4 beta); the
// (1 + eps_beta) correction is not available in closed form, so callers
// may override alpha_c wherever it is consumed.
inline double alpha_c_approx(double beta) {
    require(beta > 0.0, "alpha_c_approx: beta must be > 0");
    return std::log(4.0 * beta) / (4.0 * beta);
}

}  // namespace sosim
