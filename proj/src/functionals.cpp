#include "jnkit/functionals.hpp"

#include <cmath>

#include "jnkit/maximal.hpp"
#include "jnkit/weights.hpp"

namespace jnkit {

const char* to_string(FunctionalKind k) {
    switch (k) {
        case FunctionalKind::measure_quotient: return "measure_quotient";
        case FunctionalKind::oscillation: return "oscillation";
        case FunctionalKind::table: return "table";
    }
    return "?";
}

namespace {

std::vector<std::vector<double>> empty_levels(const GridConfig& cfg) {
    std::vector<std::vector<double>> levels(cfg.depth + 1);
    for (int k = 0; k <= cfg.depth; ++k) levels[k].assign(std::size_t{1} << (cfg.dim * k), 0.0);
    return levels;
}

std::vector<double> ones(const GridConfig& cfg) { return std::vector<double>(cfg.cells(), 1.0); }

// Mean |f - f_R| for every dyadic R, per level.
std::vector<std::vector<double>> oscillation_levels(const GridFunction& f) {
    const GridConfig& cfg = f.config();
    auto levels = empty_levels(cfg);
    for_each_cube(cfg, DyadicCube::root(), [&](const DyadicCube& r) {
        const auto cells = r.cells(cfg);
        const double m = average(f, r);
        double s = 0.0;
        for (std::size_t c : cells) s += std::abs(f[c] - m);
        levels[r.level][r.flat_index(cfg.dim)] = s / static_cast<double>(cells.size());
    });
    return levels;
}

}  // namespace

Functional Functional::measure_quotient(const GridConfig& cfg, const GridFunction* mu, const GridFunction* w, double r,
                                        double scale) {
    if (!(r >= 1.0)) throw DomainError("functional exponent r must be >= 1");
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw DomainError("functional scale must be finite and >= 0");
    const auto mu_vals = mu ? std::vector<double>(mu->values().begin(), mu->values().end()) : ones(cfg);
    const auto w_vals = w ? std::vector<double>(w->values().begin(), w->values().end()) : ones(cfg);
    const DyadicSums ms(cfg, mu_vals);
    const DyadicSums ws(cfg, w_vals);
    Functional a;
    a.kind_ = FunctionalKind::measure_quotient;
    a.cfg_ = cfg;
    a.levels_ = empty_levels(cfg);
    for_each_cube(cfg, DyadicCube::root(), [&](const DyadicCube& q) {
        a.levels_[q.level][q.flat_index(cfg.dim)] = scale * std::pow(ms.cell_sum(q) / ws.cell_sum(q), 1.0 / r);
    });
    return a;
}

Functional Functional::oscillation(const GridFunction& f) {
    Functional a;
    a.kind_ = FunctionalKind::oscillation;
    a.cfg_ = f.config();
    a.levels_ = oscillation_levels(f);
    return a;
}

Functional Functional::table(const GridConfig& cfg, std::vector<std::vector<double>> levels) {
    if (levels.size() != static_cast<std::size_t>(cfg.depth + 1))
        throw DomainError("functional table needs one row per level");
    for (int k = 0; k <= cfg.depth; ++k) {
        if (levels[k].size() != (std::size_t{1} << (cfg.dim * k)))
            throw DomainError("functional table row " + std::to_string(k) + " has the wrong length");
        for (double v : levels[k])
            if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("functional values must be finite and >= 0");
    }
    Functional a;
    a.kind_ = FunctionalKind::table;
    a.cfg_ = cfg;
    a.levels_ = std::move(levels);
    return a;
}

Functional Functional::scaled(double c) const {
    Functional a = *this;
    for (auto& level : a.levels_)
        for (double& v : level) v *= c;
    return a;
}

DrNorm dr_norm_estimate(const Functional& a, const GridFunction* w, double r, const DyadicCube& q) {
    if (!(r >= 1.0)) throw DomainError("D_r exponent must be >= 1");
    const GridConfig& cfg = a.config();
    if (w && !(w->config() == cfg)) throw DomainError("weight and functional live on different grids");
    const auto w_vals = w ? std::vector<double>(w->values().begin(), w->values().end()) : ones(cfg);
    const DyadicSums ws(cfg, w_vals);
    const double cell = cfg.cell_volume();

    // best[k][i]: largest sum_P w(P) a(P)^r over antichains below cube (k, i).
    std::vector<std::vector<double>> best(cfg.depth + 1);
    for (int k = cfg.depth; k >= q.level; --k) {
        // Only the cubes of level k inside Q are needed; compute the whole level for simplicity.
        const std::size_t count = std::size_t{1} << (cfg.dim * k);
        best[k].assign(count, 0.0);
        for (std::size_t i = 0; i < count; ++i) {
            const DyadicCube c = DyadicCube::from_flat(cfg.dim, k, i);
            if (!q.contains(c)) continue;
            const double own = ws.cell_sum(c) * cell * std::pow(a(c), r);
            double kids = 0.0;
            if (k < cfg.depth)
                for (unsigned ch = 0; ch < cfg.children_per_cube(); ++ch)
                    kids += best[k + 1][c.child(cfg.dim, ch).flat_index(cfg.dim)];
            best[k][i] = std::max(own, kids);
        }
    }

    DrNorm out;
    out.witness = q;
    for_each_cube(cfg, q, [&](const DyadicCube& c) {
        if (out.infinite) return;
        const double own = ws.cell_sum(c) * cell * std::pow(a(c), r);
        const double b = best[c.level][c.flat_index(cfg.dim)];
        if (own == 0.0) {
            if (b > 0.0) {
                out.infinite = true;
                out.value = INFINITY;
                out.witness = c;
            }
            return;
        }
        const double ratio = std::pow(b / own, 1.0 / r);
        if (ratio > out.value) {
            out.value = ratio;
            out.witness = c;
        }
    });
    return out;
}

double poincare_hypothesis_ratio(const GridFunction& f, const Functional& a, const DyadicCube& q) {
    const auto osc = oscillation_levels(f);
    double worst = 0.0;
    for_each_cube(f.config(), q, [&](const DyadicCube& r) {
        const double o = osc[r.level][r.flat_index(f.config().dim)];
        const double v = a(r);
        if (o == 0.0) return;
        worst = std::max(worst, v == 0.0 ? INFINITY : o / v);
    });
    return worst;
}

VerificationRecord verify_poincare(const GridFunction& f, const Functional& a, const GridFunction& w, double r,
                                   const DyadicCube& q) {
    const GridConfig& cfg = f.config();
    if (!(a.config() == cfg) || !(w.config() == cfg)) throw DomainError("inputs live on different grids");
    const double hyp = poincare_hypothesis_ratio(f, a, q);
    if (hyp > 1.0 + 1e-12)
        throw DomainError("starting hypothesis avg_R|f - f_R| <= a(R) fails (worst ratio " + std::to_string(hyp) + ")");
    const double fq = average(f, q);
    const GridFunction g = f.map([fq](double v) { return std::abs(v - fq); });

    VerificationRecord rec;
    rec.theorem = "poincare";
    rec.add_input("Q", q.to_string(cfg.dim));
    rec.add_input("r", r);
    rec.add_input("functional", to_string(a.kind()));
    rec.lhs = weak_lorentz_norm(g, q, &w, r, true);
    if (a(q) == 0.0 && rec.lhs > 0.0) throw DomainError("a(Q) = 0 while f is not constant on Q");
    const DrNorm norm = dr_norm_estimate(a, &w, r, q);
    rec.factors = {{"r", r}, {"A_infinity", ainfty_constant(w).value}, {"norm_a", norm.value}, {"a_Q", a(q)}};
    rec.add_input("hypothesis_ratio", hyp);
    return rec;
}

GridFunction gradient_density(const GridFunction& f) {
    const GridConfig& cfg = f.config();
    const std::size_t side = cfg.side();
    double mx = 0.0;
    for (double v : f.values()) mx = std::max(mx, std::abs(v));
    std::vector<double> d(cfg.cells(), 0.0);
    for (std::size_t i = 0; i < cfg.cells(); ++i) {
        const std::size_t x = i % side, y = i / side;
        double s = 0.0;
        if (x > 0) s += std::abs(f[i] - f[i - 1]);
        if (x + 1 < side) s += std::abs(f[i] - f[i + 1]);
        if (cfg.dim == 2) {
            if (y > 0) s += std::abs(f[i] - f[i - side]);
            if (y + 1 < side) s += std::abs(f[i] - f[i + side]);
        }
        d[i] = 1.0 + s / (mx + 1.0);
    }
    return GridFunction(cfg, std::move(d), Interpretation::weight);
}

}  // namespace jnkit
