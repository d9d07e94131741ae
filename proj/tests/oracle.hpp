#pragma once

// Naive reference implementations used as test oracles. Everything here works
// from the raw cell vector by direct enumeration of dyadic cubes and shares no
// code with the library beyond the DyadicCube struct used as a plain label.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "jnkit/grid.hpp"

namespace oracle {

struct Cube {
    int level = 0;
    long x = 0, y = 0;
};

inline std::vector<Cube> all_cubes(int n, int J) {
    std::vector<Cube> out;
    for (int k = 0; k <= J; ++k) {
        const long side = 1L << k;
        for (long y = 0; y < (n == 2 ? side : 1); ++y)
            for (long x = 0; x < side; ++x) out.push_back({k, x, y});
    }
    return out;
}

inline std::vector<std::size_t> cells(int n, int J, const Cube& c) {
    const long span = 1L << (J - c.level);
    const long side = 1L << J;
    std::vector<std::size_t> out;
    for (long y = c.y * span; y < (n == 2 ? (c.y + 1) * span : 1); ++y)
        for (long x = c.x * span; x < (c.x + 1) * span; ++x) out.push_back(static_cast<std::size_t>(y * side + x));
    return out;
}

inline bool inside(const Cube& inner, const Cube& outer) {
    if (inner.level < outer.level) return false;
    const int s = inner.level - outer.level;
    return (inner.x >> s) == outer.x && (inner.y >> s) == outer.y;
}

inline bool contains_cell(int J, const Cube& c, std::size_t cell, int n) {
    const long side = 1L << J;
    const long x = static_cast<long>(cell) % side, y = n == 2 ? static_cast<long>(cell) / side : 0;
    const int s = J - c.level;
    return (x >> s) == c.x && (y >> s) == c.y;
}

inline double volume(int n, const Cube& c) { return std::pow(0.5, n * c.level); }

inline double mean(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    double s = 0;
    for (auto i : idx) s += v[i];
    return s / static_cast<double>(idx.size());
}

inline double mean_abs_dev(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    const double m = mean(v, idx);
    double s = 0;
    for (auto i : idx) s += std::abs(v[i] - m);
    return s / static_cast<double>(idx.size());
}

inline Cube from_lib(const jnkit::DyadicCube& q) { return {q.level, q.index[0], q.index[1]}; }

/// M_Q h: cellwise max over dyadic R in D(Q) containing the cell of avg_R |h|; zero off Q.
inline std::vector<double> local_maximal(int n, int J, const std::vector<double>& h, const Cube& q) {
    std::vector<double> out(h.size(), 0.0);
    std::vector<double> a(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) a[i] = std::abs(h[i]);
    for (const auto& r : all_cubes(n, J)) {
        if (!inside(r, q)) continue;
        const auto idx = cells(n, J, r);
        const double m = mean(a, idx);
        for (auto i : idx) out[i] = std::max(out[i], m);
    }
    return out;
}

/// Dyadic sharp function of degree 0 localized to Q.
inline std::vector<double> sharp(int n, int J, const std::vector<double>& f, const Cube& q) {
    std::vector<double> out(f.size(), 0.0);
    for (const auto& r : all_cubes(n, J)) {
        if (!inside(r, q)) continue;
        const auto idx = cells(n, J, r);
        const double m = mean_abs_dev(f, idx);
        for (auto i : idx) out[i] = std::max(out[i], m);
    }
    return out;
}

/// Maximal strict dyadic subcubes R of Q with avg_R|h| > lambda.
inline std::vector<Cube> cz_cubes(int n, int J, const std::vector<double>& h, const Cube& q, double lambda) {
    std::vector<double> a(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) a[i] = std::abs(h[i]);
    std::vector<Cube> out;
    for (const auto& r : all_cubes(n, J)) {
        if (!inside(r, q) || r.level == q.level) continue;
        if (!(mean(a, cells(n, J, r)) > lambda)) continue;
        bool maximal = true;
        for (int k = q.level + 1; k < r.level; ++k) {
            const Cube anc{k, r.x >> (r.level - k), r.y >> (r.level - k)};
            if (mean(a, cells(n, J, anc)) > lambda) maximal = false;
        }
        if (maximal) out.push_back(r);
    }
    return out;
}

inline double ap(int n, int J, const std::vector<double>& w, double p) {
    const double pd = p / (p - 1.0);
    double best = 0;
    for (const auto& q : all_cubes(n, J)) {
        const auto idx = cells(n, J, q);
        double s1 = 0, s2 = 0;
        for (auto i : idx) {
            s1 += w[i];
            s2 += std::pow(w[i], 1.0 - pd);
        }
        const double m = static_cast<double>(idx.size());
        best = std::max(best, (s1 / m) * std::pow(s2 / m, p - 1.0));
    }
    return best;
}

inline double ap_bump(int n, int J, const std::vector<double>& w, double p, double r) {
    const double pd = p / (p - 1.0);
    double best = 0;
    for (const auto& q : all_cubes(n, J)) {
        const auto idx = cells(n, J, q);
        double s1 = 0, s2 = 0;
        for (auto i : idx) {
            s1 += std::pow(w[i], r);
            s2 += std::pow(w[i], 1.0 - pd);
        }
        const double m = static_cast<double>(idx.size());
        best = std::max(best, std::pow(s1 / m, 1.0 / r) * std::pow(s2 / m, p - 1.0));
    }
    return best;
}

/// int_Q M_Q(w 1_Q) / w(Q), sup over Q.
inline double ainfty(int n, int J, const std::vector<double>& w) {
    double best = 0;
    const double cell = std::pow(0.5, n * J);
    for (const auto& q : all_cubes(n, J)) {
        const auto m = local_maximal(n, J, w, q);
        double num = 0, den = 0;
        for (auto i : cells(n, J, q)) {
            num += m[i] * cell;
            den += w[i] * cell;
        }
        best = std::max(best, num / den);
    }
    return best;
}

/// Ambient dyadic C_p: int_Q M_Q(w 1_Q) / int (M 1_Q)^p w.
inline double cp(int n, int J, const std::vector<double>& w, double p) {
    double best = 0;
    const double cell = std::pow(0.5, n * J);
    const auto cubes = all_cubes(n, J);
    for (const auto& q : cubes) {
        const auto m = local_maximal(n, J, w, q);
        double num = 0;
        for (auto i : cells(n, J, q)) num += m[i] * cell;
        // M 1_Q(x) = sup over dyadic R containing x of |R cap Q| / |R|.
        std::vector<double> m1(w.size(), 0.0);
        for (const auto& r : cubes) {
            double frac = 0;
            if (inside(r, q)) frac = 1;
            else if (inside(q, r)) frac = volume(n, q) / volume(n, r);
            if (frac == 0) continue;
            for (auto i : cells(n, J, r)) m1[i] = std::max(m1[i], frac);
        }
        double den = 0;
        for (std::size_t i = 0; i < w.size(); ++i) den += std::pow(m1[i], p) * w[i] * cell;
        best = std::max(best, num / den);
    }
    return best;
}

/// w_r(Q) = |Q| (avg_Q w^r)^{1/r}.
inline double bump(int n, int J, const std::vector<double>& w, const Cube& q, double r) {
    const auto idx = cells(n, J, q);
    double s = 0;
    for (auto i : idx) s += std::pow(w[i], r);
    return volume(n, q) * std::pow(s / static_cast<double>(idx.size()), 1.0 / r);
}

/// Exhaustive antichain enumeration: every achievable value of
/// sum_P w(P) a(P)^r over antichains P of D(R) (including the empty one).
inline void antichain_sums(int n, int J, const Cube& c, const std::function<double(const Cube&)>& term,
                           std::vector<double>& out) {
    const double own = term(c);
    std::vector<double> combos{0.0};
    if (c.level < J) {
        for (int ch = 0; ch < (1 << n); ++ch) {
            const Cube kid{c.level + 1, 2 * c.x + (ch & 1), n == 2 ? 2 * c.y + ((ch >> 1) & 1) : 0};
            std::vector<double> sub;
            antichain_sums(n, J, kid, term, sub);
            std::vector<double> next;
            next.reserve(combos.size() * sub.size());
            for (double a : combos)
                for (double b : sub) next.push_back(a + b);
            combos.swap(next);
        }
    }
    out = std::move(combos);
    out.push_back(own);
}

/// sup over R in D(Q) of (max_P sum w(P) a(P)^r / (w(R) a(R)^r))^{1/r}.
inline double dr_norm(int n, int J, const std::vector<double>& w, const std::function<double(const Cube&)>& a,
                      double r, const Cube& q) {
    const double cell = std::pow(0.5, n * J);
    auto term = [&](const Cube& c) {
        double wc = 0;
        for (auto i : cells(n, J, c)) wc += w[i] * cell;
        return wc * std::pow(a(c), r);
    };
    double best = 1.0;
    for (const auto& rc : all_cubes(n, J)) {
        if (!inside(rc, q)) continue;
        std::vector<double> sums;
        antichain_sums(n, J, rc, term, sums);
        const double top = *std::max_element(sums.begin(), sums.end());
        const double own = term(rc);
        if (own == 0.0) {
            if (top > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        best = std::max(best, std::pow(top / own, 1.0 / r));
    }
    return best;
}

}  // namespace oracle
