#include "jnkit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "jnkit/polybmo.hpp"
#include "jnkit/text.hpp"

namespace jnkit {

namespace {

double dual(double p) { return p / (p - 1.0); }

void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (!(a.config() == b.config())) throw DomainError("inputs live on different grids");
}

// Sum over the cells of Q of g(value, weight) * cell volume.
template <typename Fn>
double cell_integral(const GridFunction& F, const GridFunction& w, const DyadicCube& q, Fn&& g) {
    double s = 0.0;
    for (std::size_t c : q.cells(F.config())) s += g(F[c], w[c]);
    return s * F.config().cell_volume();
}

double lattice_lp(const LatticeField& F, const LatticeField& w, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < F.values.size(); ++i) s += std::pow(std::abs(F.values[i]), p) * w.values[i];
    return std::pow(s * F.cell_volume(), 1.0 / p);
}

// |f - P_Q f| on the cells of Q (ordered as Q.cells()).
std::vector<double> residual_on(const GridFunction& f, const DyadicCube& q, int degree) {
    const auto cells = q.cells(f.config());
    std::vector<double> r(cells.size());
    if (degree == 0) {
        const double m = average(f, q);
        for (std::size_t i = 0; i < cells.size(); ++i) r[i] = std::abs(f[cells[i]] - m);
    } else {
        const Projection proj = project(f, q, cached_basis(degree, f.config().dim));
        for (std::size_t i = 0; i < cells.size(); ++i) r[i] = std::abs(f[cells[i]] - proj.cell_values[i]);
    }
    return r;
}

void base_inputs(VerificationRecord& rec, const DyadicCube& q, int dim) { rec.add_input("Q", q.to_string(dim)); }

double positive_log(double x) { return x > 1.0 ? std::log(x) : 0.0; }

}  // namespace

// ---------------------------------------------------------------------------

TailFit fit_tail(const std::vector<SurvivalPoint>& s, double lo, double hi) {
    TailFit fit;
    fit.points = s;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].mass > s[i - 1].mass) fit.monotone = false;
    std::vector<SurvivalPoint> positive;
    for (const auto& pt : s)
        if (pt.mass > 0.0) positive.push_back(pt);
    if (positive.size() <= 2) {
        fit.degenerate = true;
        return fit;
    }
    std::vector<SurvivalPoint> window;
    for (const auto& pt : positive)
        if (pt.mass >= lo && pt.mass <= hi) window.push_back(pt);
    if (window.size() < 2) {
        window.clear();
        for (const auto& pt : positive)
            if (pt.t > 0.0) window.push_back(pt);
    }
    if (window.size() < 2) {
        fit.degenerate = true;
        return fit;
    }
    fit.used = window.size();
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double n = static_cast<double>(window.size());
    for (const auto& pt : window) {
        const double y = std::log(pt.mass);
        st += pt.t;
        sy += y;
        stt += pt.t * pt.t;
        sty += pt.t * y;
    }
    const double denom = n * stt - st * st;
    const double slope = denom != 0.0 ? (n * sty - st * sy) / denom : 0.0;
    const double intercept = (sy - slope * st) / n;
    fit.c = -slope;
    fit.C = std::exp(intercept);
    double rss = 0.0;
    for (const auto& pt : window) {
        const double e = std::log(pt.mass) - (intercept + slope * pt.t);
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

double admissible_rate(const std::vector<SurvivalPoint>& s, double prefactor) {
    double rate = INFINITY;
    for (const auto& pt : s) {
        if (pt.t <= 0.0 || pt.mass <= 0.0) continue;
        rate = std::min(rate, std::log(prefactor / pt.mass) / pt.t);
    }
    return rate;
}

BridgeCheck tail_bridge(std::span<const double> values, std::span<const double> masses) {
    if (values.size() != masses.size()) throw DomainError("values and masses differ in length");
    BridgeCheck b;
    double top = 0.0;
    for (double v : values) {
        if (v < 0.0) throw DomainError("bridge needs a non-negative function");
        top = std::max(top, v);
    }
    if (top == 0.0) {
        b.hypothesis_holds = b.holds = true;
        return b;
    }
    // ||F||_p via a scaled sum to stay in range for large p.
    auto norm = [&](double p) {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] > 0.0) s += masses[i] * std::pow(values[i] / top, p);
        return top * std::pow(s, 1.0 / p);
    };
    const double step = 1.0 / 64.0;
    double best = 0.0, best_p = 1.0;
    for (double p = 1.0; top / p >= best; p += step) {
        const double g = norm(p) / p;
        if (g > best) {
            best = g;
            best_p = p;
        }
    }
    // Golden-section refinement around the best grid point.
    double a = std::max(1.0, best_p - step), c = best_p + step;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
    double f1 = norm(x1) / x1, f2 = norm(x2) / x2;
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (c - a);
            f2 = norm(x2) / x2;
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - phi * (c - a);
            f1 = norm(x1) / x1;
        }
    }
    best = std::max({best, f1, f2});
    b.gamma_tilde = best;
    b.hypothesis_holds = true;
    for (double p = 1.0; p <= 8.0; p += step)
        if (norm(p) > best * p * (1.0 + 1e-12)) b.hypothesis_holds = false;

    std::vector<std::pair<double, double>> vm;
    for (std::size_t i = 0; i < values.size(); ++i) vm.emplace_back(values[i], masses[i]);
    std::sort(vm.begin(), vm.end());
    double above = 0.0;
    for (const auto& e : vm) above += e.second;
    auto bound = [&](double t) { return 2.0 * std::exp(-t / (4.0 * best)); };
    b.worst_ratio = above / bound(0.0);
    for (std::size_t i = 0; i < vm.size();) {
        const double t = vm[i].first;
        while (i < vm.size() && vm[i].first == t) above -= vm[i++].second;
        b.worst_ratio = std::max(b.worst_ratio, std::max(above, 0.0) / bound(t));
    }
    b.holds = b.worst_ratio <= 1.0;
    return b;
}

// ---------------------------------------------------------------------------

double weighted_ratio_norm(const GridFunction& F, const GridFunction& w, double p, double r, const DyadicCube& q) {
    require_same_grid(F, w);
    const double s = cell_integral(F, w, q, [p](double v, double wv) { return std::pow(v, p) * wv; });
    return std::pow(s / bump(w, q, r), 1.0 / p);
}

std::vector<VerificationRecord> check_jn_ratio(const RatioField& F, const GridFunction& w,
                                               const std::vector<double>& ps, double r, const DyadicCube& q,
                                               double calibration) {
    if (!(r > 1.0)) throw DomainError("bump exponent r must exceed 1");
    const int dim = w.config().dim;
    const double K = ainfty_constant(w).value;
    const double delta = rhi_delta(RhiMode::ainfty, K, calibration);
    const double w_q = bump(w, q, 1.0);
    const double w_rq = bump(w, q, 1.0 + delta);
    std::vector<VerificationRecord> out;
    for (double p : ps) {
        if (!(p >= 1.0)) throw DomainError("integrability exponent p must be >= 1");
        VerificationRecord bumped;
        bumped.theorem = "jn_ratio_bump";
        base_inputs(bumped, q, dim);
        bumped.add_input("scope", to_string(F.scope));
        bumped.add_input("p", p);
        bumped.add_input("r", r);
        bumped.lhs = weighted_ratio_norm(F.values, w, p, r, q);
        bumped.factors = {{"p", p}, {"r_dual", dual(r)}};
        bumped.finalize(INFINITY);
        out.push_back(bumped);

        VerificationRecord ainf;
        ainf.theorem = "jn_ratio_ainfty";
        base_inputs(ainf, q, dim);
        ainf.add_input("scope", to_string(F.scope));
        ainf.add_input("p", p);
        ainf.add_input("delta", delta);
        ainf.lhs = weighted_ratio_norm(F.values, w, p, 1.0, q);
        ainf.factors = {{"p", p}, {"A_infinity", K}};
        if (!(w_rq <= 2.0 * w_q)) {
            ainf.status = RecordStatus::error;
            ainf.note = "w_r(Q) > 2 w(Q) at r = 1 + delta";
        }
        ainf.finalize(INFINITY);
        out.push_back(ainf);
    }
    return out;
}

TailReport check_exponential_tails(const RatioField& F, const GridFunction& w, const DyadicCube& q,
                                   const std::vector<double>& lambdas, const std::vector<double>& gammas) {
    require_same_grid(F.values, w);
    const GridConfig& cfg = w.config();
    TailReport rep;
    const double K = ainfty_constant(w).value;
    const double wq = bump(w, q, 1.0);

    rep.fit = fit_tail(survival_function(F.values, q, &w));
    VerificationRecord tail;
    tail.theorem = "jn_exponential_tail";
    base_inputs(tail, q, cfg.dim);
    tail.add_input("scope", to_string(F.scope));
    if (rep.fit.degenerate) {
        tail.status = RecordStatus::skipped;
        tail.note = "degenerate tail";
    } else {
        tail.add_input("C", rep.fit.C);
        tail.add_input("c", rep.fit.c);
        tail.add_input("residual", rep.fit.residual);
        tail.add_input("fitted_points", static_cast<double>(rep.fit.used));
        tail.lhs = rep.fit.c > 0.0 ? 1.0 / rep.fit.c : INFINITY;
        tail.factors = {{"A_infinity", K}};
        if (!rep.fit.monotone) {
            tail.status = RecordStatus::error;
            tail.note = "survival function increases";
        }
    }
    tail.finalize(INFINITY);
    rep.records.push_back(tail);

    // Good-lambda table; lambda is measured in units of avg_Q of the numerator.
    double scale = 0.0;
    for (std::size_t c : q.cells(cfg)) scale += F.numerator[c];
    scale /= static_cast<double>(q.cell_count(cfg));
    for (double lm : lambdas) {
        for (double g : gammas) {
            const double lambda = lm * scale;
            double mass = 0.0;
            for (std::size_t c : q.cells(cfg))
                if (F.numerator[c] > lambda && F.denominator[c] <= g * lambda) mass += w[c];
            mass *= cfg.cell_volume() / wq;
            rep.table.push_back({lambda, g, mass});
            if (mass > 0.0) rep.good_lambda_rate = std::min(rep.good_lambda_rate, -g * K * std::log(mass / 2.0));
        }
    }
    VerificationRecord gl;
    gl.theorem = "jn_good_lambda";
    base_inputs(gl, q, cfg.dim);
    gl.add_input("scope", to_string(F.scope));
    gl.add_input("c1", 2.0);
    gl.add_input("c2", rep.good_lambda_rate);
    gl.lhs = std::isinf(rep.good_lambda_rate) ? 0.0 : 1.0 / rep.good_lambda_rate;
    gl.finalize(INFINITY);
    rep.records.push_back(gl);

    std::vector<double> vals, masses;
    for (std::size_t c : q.cells(cfg)) {
        vals.push_back(F.values[c]);
        masses.push_back(w[c] * cfg.cell_volume() / wq);
    }
    rep.bridge = tail_bridge(vals, masses);
    VerificationRecord br;
    br.theorem = "exponential_bridge";
    base_inputs(br, q, cfg.dim);
    br.add_input("scope", to_string(F.scope));
    br.add_input("gamma_tilde", rep.bridge.gamma_tilde);
    br.add_input("hypothesis", rep.bridge.hypothesis_holds ? "holds" : "fails");
    br.lhs = rep.bridge.worst_ratio;
    if (!rep.bridge.hypothesis_holds) {
        br.status = RecordStatus::error;
        br.note = "L^p hypothesis fails";
    }
    br.finalize(INFINITY);
    rep.records.push_back(br);
    return rep;
}

double weighted_deviation_norm(const GridFunction& f, const GridFunction& w, double p, double r, int degree,
                               const DyadicCube& q) {
    require_same_grid(f, w);
    if (!(p > 1.0)) throw DomainError("p must exceed 1");
    const double pd = dual(p);
    const auto res = residual_on(f, q, degree);
    const auto cells = q.cells(f.config());
    double s = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) s += std::pow(res[i] / w[cells[i]], pd) * w[cells[i]];
    s *= f.config().cell_volume();
    return std::pow(s / bump(w, q, r), 1.0 / pd);
}

VerificationRecord check_weighted_bmo(const GridFunction& f, const GridFunction& w, double p, double r,
                                      const DyadicCube& q) {
    if (!(r > 1.0)) throw DomainError("bump exponent r must exceed 1");
    const int dim = f.config().dim;
    VerificationRecord rec;
    rec.theorem = "weighted_bmo_bump";
    base_inputs(rec, q, dim);
    rec.add_input("p", p);
    rec.add_input("r", r);
    rec.lhs = weighted_deviation_norm(f, w, p, r, 0, q);
    const double norm = bmo_norm(f, cached_basis(0, dim), WeightedBy{&w, r}).value;
    if (norm == 0.0 && rec.lhs > 0.0) throw InvariantError("vanishing weighted BMO norm with a non-zero deviation");
    const double pd = dual(p);
    rec.factors = {{"p_dual", pd},
                   {"A_p^r^(1/p)", std::pow(ap_bump_constant(w, p, r).value, 1.0 / p)},
                   {"r_dual^(1/p_dual)", std::pow(dual(r), 1.0 / pd)},
                   {"bmo_w_r", norm}};
    rec.finalize(INFINITY);
    return rec;
}

VerificationRecord check_weighted_bmo_ap(const GridFunction& f, const GridFunction& w, double p, const DyadicCube& q) {
    const int dim = f.config().dim;
    VerificationRecord rec;
    rec.theorem = "weighted_bmo_ap";
    base_inputs(rec, q, dim);
    rec.add_input("p", p);
    rec.lhs = weighted_deviation_norm(f, w, p, 1.0, 0, q);
    const double norm = bmo_norm(f, cached_basis(0, dim), WeightedBy{&w, 1.0}).value;
    if (norm == 0.0 && rec.lhs > 0.0) throw InvariantError("vanishing weighted BMO norm with a non-zero deviation");
    const double pd = dual(p);
    rec.factors = {{"p_dual", pd},
                   {"A_p^(1/p)", std::pow(ap_constant(w, p).value, 1.0 / p)},
                   {"A_infinity^(1/p_dual)", std::pow(ainfty_constant(w).value, 1.0 / pd)},
                   {"bmo_w_1", norm}};
    rec.finalize(INFINITY);
    return rec;
}

VerificationRecord check_weighted_bmo_exponential(const GridFunction& f, const GridFunction& w, const DyadicCube& q) {
    require_same_grid(f, w);
    const GridConfig& cfg = f.config();
    const double norm = bmo_norm(f, cached_basis(0, cfg.dim), WeightedBy{&w, 1.0}).value;
    const double a1 = ap_constant(w, 1.0).value;
    const double fq = average(f, q);
    std::vector<double> g(cfg.cells(), 0.0);
    for (std::size_t c : q.cells(cfg)) g[c] = std::abs(f[c] - fq) / w[c];
    const auto surv = survival_function(GridFunction(cfg, std::move(g)), q, &w);
    VerificationRecord rec;
    rec.theorem = "weighted_bmo_exponential";
    base_inputs(rec, q, cfg.dim);
    // c >= t / (K ||f|| log(2 / mass)) at every breakpoint.
    double worst = 0.0;
    for (const auto& pt : surv)
        if (pt.t > 0.0 && pt.mass > 0.0) worst = std::max(worst, pt.t / std::log(2.0 / pt.mass));
    rec.lhs = worst;
    rec.factors = {{"A_1", a1}, {"bmo_w_1", norm}};
    rec.finalize(INFINITY);
    return rec;
}

VerificationRecord check_sharp_norm_inequality(const GridFunction& f, const GridFunction& w, double p, double q) {
    require_same_grid(f, w);
    if (!(p > 1.0) || !(q > p)) throw DomainError("the norm inequality needs 1 < p < q");
    const GridConfig& cfg = f.config();
    const int factor = shift_denominator(cfg.dim);
    const LatticeField wl = refine(w, factor);
    const LatticeField mf = shifted_maximal_field(f);
    const LatticeField sharp = shifted_sharp_field(f, DyadicCube::root(), 0);
    const double sharp_norm = lattice_lp(sharp, wl, p);
    if (sharp_norm == 0.0) throw DomainError("sharp maximal function vanishes: f is constant on the ambient cube");
    const double K = cp_constant(w, q).value;
    VerificationRecord rec;
    rec.theorem = "sharp_norm_inequality";
    rec.add_input("p", p);
    rec.add_input("q", q);
    rec.add_input("scope", "shifted");
    rec.lhs = lattice_lp(mf, wl, p);
    rec.factors = {{"pq/(q-p)", p * q / (q - p)}, {"max(1,K log+K)", std::max(1.0, K * positive_log(K))},
                   {"sharp_norm", sharp_norm}};
    rec.add_input("C_q", K);
    rec.finalize(INFINITY);
    return rec;
}

NondyadicReport check_nondyadic_jn(const GridFunction& f, const std::vector<double>& lambdas,
                                   const std::vector<double>& gammas) {
    const GridConfig& cfg = f.config();
    const DyadicCube root = DyadicCube::root();
    const int factor = shift_denominator(cfg.dim);
    const double fq = average(f, root);
    const LatticeField num = shifted_maximal_field(f.map([fq](double v) { return v - fq; }));
    const LatticeField den = shifted_sharp_field(f, root, 0);
    LatticeField ratio{num.dim, num.side, std::vector<double>(num.values.size(), 0.0)};
    for (std::size_t i = 0; i < ratio.values.size(); ++i) {
        if (den.values[i] == 0.0) {
            if (num.values[i] > 0.0) throw InvariantError("positive maximal function over a vanishing sharp function");
            continue;
        }
        ratio.values[i] = num.values[i] / den.values[i];
    }
    NondyadicReport rep;
    rep.fit = fit_tail(survival_function(ratio));
    VerificationRecord tail;
    tail.theorem = "nondyadic_tail";
    tail.add_input("scope", "shifted");
    if (rep.fit.degenerate) {
        tail.status = RecordStatus::skipped;
        tail.note = "degenerate tail";
    } else {
        tail.add_input("C", rep.fit.C);
        tail.add_input("c", rep.fit.c);
        tail.add_input("residual", rep.fit.residual);
        tail.lhs = rep.fit.c > 0.0 ? 1.0 / rep.fit.c : INFINITY;
    }
    tail.finalize(INFINITY);
    rep.records.push_back(tail);

    // Superlevel sets of M f at base resolution: a cell belongs to {Mf > lambda}
    // when every lattice cell inside it does.
    const LatticeField mf = shifted_maximal_field(f);
    const GridFunction mf_min = coarsen_min(mf, cfg, factor);
    const double four_n = std::pow(4.0, cfg.dim);
    const std::size_t sub = static_cast<std::size_t>(std::pow(factor, cfg.dim));
    std::vector<double> worst_by_gamma(gammas.size(), 0.0);
    for (double lambda : lambdas) {
        std::vector<DyadicCube> cubes;
        std::function<void(const DyadicCube&)> visit = [&](const DyadicCube& c) {
            const auto cells = c.cells(cfg);
            if (std::all_of(cells.begin(), cells.end(), [&](std::size_t i) { return mf_min[i] > lambda; })) {
                cubes.push_back(c);
                return;
            }
            if (c.level < cfg.depth)
                for (unsigned ch = 0; ch < cfg.children_per_cube(); ++ch) visit(c.child(cfg.dim, ch));
        };
        visit(root);
        double previous = 0.0;
        for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
            const double g = gammas[gi];
            WhitneyRow row{lambda, g, cubes.size(), 0.0};
            for (const auto& c : cubes) {
                // Lattice cells of c: refine each base cell into factor^n cells.
                std::size_t hits = 0;
                const std::size_t side = mf.side;
                for (std::size_t cell : c.cells(cfg)) {
                    const std::size_t bx = cell % cfg.side(), by = cell / cfg.side();
                    for (std::size_t k = 0; k < sub; ++k) {
                        const std::size_t lx = bx * factor + k % factor;
                        const std::size_t ly = cfg.dim == 2 ? by * factor + k / factor : 0;
                        const std::size_t li = ly * side + lx;
                        if (mf.values[li] > four_n * lambda && den.values[li] <= g * lambda) ++hits;
                    }
                }
                row.worst = std::max(row.worst, static_cast<double>(hits) /
                                                    static_cast<double>(c.cell_count(cfg) * sub));
            }
            if (gi > 0 && gammas[gi] >= gammas[gi - 1] && row.worst < previous) rep.monotone = false;
            previous = row.worst;
            worst_by_gamma[gi] = std::max(worst_by_gamma[gi], row.worst);
            rep.table.push_back(row);
        }
    }
    // Fit max_lambda worst ~ C exp(-c / gamma) and the admissible rate with C = 2.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        const double m = worst_by_gamma[gi];
        if (m <= 0.0) continue;
        const double x = 1.0 / gammas[gi], y = std::log(m);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
        rep.whitney_rate = std::min(rep.whitney_rate, -gammas[gi] * std::log(m / 2.0));
    }
    if (n >= 2) {
        const double dn = static_cast<double>(n);
        const double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
        rep.whitney_c = -slope;
        rep.whitney_C = std::exp((sy - slope * sx) / dn);
    }
    VerificationRecord wh;
    wh.theorem = "whitney_good_lambda";
    wh.add_input("scope", "shifted");
    wh.add_input("fit_C", rep.whitney_C);
    wh.add_input("fit_c", rep.whitney_c);
    wh.add_input("c_with_C=2", rep.whitney_rate);
    wh.lhs = std::isinf(rep.whitney_rate) ? 0.0 : 1.0 / rep.whitney_rate;
    if (!rep.monotone) {
        wh.status = RecordStatus::error;
        wh.note = "good-lambda table is not monotone in gamma";
    }
    if (rep.table.empty() || std::all_of(rep.table.begin(), rep.table.end(), [](const WhitneyRow& r) { return r.cubes == 0; }))
        wh.note = "empty superlevel sets";
    wh.finalize(INFINITY);
    rep.records.push_back(wh);
    return rep;
}

std::vector<VerificationRecord> check_polynomial_jn(const RatioField& F, const GridFunction& w,
                                                    const std::vector<double>& ps, double r, const DyadicCube& q) {
    if (!(r > 1.0)) throw DomainError("bump exponent r must exceed 1");
    const double gamma = cached_basis(F.degree, w.config().dim).gamma;
    std::vector<VerificationRecord> out;
    for (double p : ps) {
        VerificationRecord rec;
        rec.theorem = "polynomial_jn";
        base_inputs(rec, q, w.config().dim);
        rec.add_input("k", static_cast<double>(F.degree));
        rec.add_input("scope", to_string(F.scope));
        rec.add_input("p", p);
        rec.add_input("r", r);
        rec.lhs = weighted_ratio_norm(F.values, w, p, r, q);
        rec.factors = {{"r_dual", dual(r)}, {"gamma", gamma}, {"p", p}};
        rec.finalize(INFINITY);
        out.push_back(rec);
    }
    return out;
}

VerificationRecord check_polynomial_weighted_bmo(const GridFunction& f, const GridFunction& w, double p, double r,
                                                 int degree, const DyadicCube& q) {
    if (!(r > 1.0)) throw DomainError("bump exponent r must exceed 1");
    const int dim = f.config().dim;
    const PolynomialBasis& basis = cached_basis(degree, dim);
    VerificationRecord rec;
    rec.theorem = "polynomial_weighted_bmo";
    base_inputs(rec, q, dim);
    rec.add_input("k", static_cast<double>(degree));
    rec.add_input("p", p);
    rec.add_input("r", r);
    rec.lhs = weighted_deviation_norm(f, w, p, r, degree, q);
    const double norm = bmo_norm(f, basis, WeightedBy{&w, r}).value;
    if (norm == 0.0 && rec.lhs > 0.0) throw InvariantError("vanishing polynomial BMO norm with a non-zero deviation");
    const double pd = dual(p);
    rec.factors = {{"gamma", basis.gamma},
                   {"p_dual", pd},
                   {"A_p^r^(1/p)", std::pow(ap_bump_constant(w, p, r).value, 1.0 / p)},
                   {"r_dual^(1/p_dual)", std::pow(dual(r), 1.0 / pd)},
                   {"bmo_k_w_r", norm}};
    rec.finalize(INFINITY);
    return rec;
}

PowerRatioMinimum minimize_power_ratio(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive and finite");
    PowerRatioMinimum m;
    m.alpha = alpha;
    m.t_star = std::pow(1.0 + alpha, 1.0 / alpha);
    m.min = std::pow(1.0 + alpha, 1.0 + 1.0 / alpha) / alpha;
    m.bound = std::numbers::e * (1.0 + 1.0 / alpha);
    // log of t^{1+a}/(t^a - 1) at t = e^u, written to avoid overflow.
    auto log_phi = [alpha](double u) { return u - std::log(-std::expm1(-alpha * u)); };
    double a = 1e-12, c = 5.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
    double f1 = log_phi(x1), f2 = log_phi(x2);
    while (c - a > 1e-14) {
        if (f1 > f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (c - a);
            f2 = log_phi(x2);
        } else {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - phi * (c - a);
            f1 = log_phi(x1);
        }
    }
    const double u = 0.5 * (a + c);
    m.search_t = std::exp(u);
    m.search_min = std::exp(log_phi(u));
    const bool agree = std::abs(m.search_min - m.min) <= 1e-9 * m.min;
    m.pass = agree && m.min < m.bound;
    return m;
}

std::string to_json(const PowerRatioMinimum& m) {
    nlohmann::ordered_json j;
    j["alpha"] = m.alpha;
    j["t_star"] = m.t_star;
    j["min"] = m.min;
    j["bound"] = m.bound;
    j["search_t"] = m.search_t;
    j["search_min"] = m.search_min;
    j["pass"] = m.pass;
    return j.dump();
}

VerificationRecord check_bmo_lp(const GridFunction& f, double p, const DyadicCube& q) {
    if (!(p >= 1.0)) throw DomainError("p must be >= 1");
    const int dim = f.config().dim;
    const double norm = bmo_norm(f, cached_basis(0, dim)).value;
    if (norm == 0.0) throw DomainError("f has zero BMO norm (constant)");
    const auto res = residual_on(f, q, 0);
    double s = 0.0;
    for (double v : res) s += std::pow(v, p);
    VerificationRecord rec;
    rec.theorem = "bmo_lp";
    base_inputs(rec, q, dim);
    rec.add_input("p", p);
    rec.lhs = std::pow(s / static_cast<double>(res.size()), 1.0 / p);
    rec.factors = {{"p", p}, {"bmo", norm}};
    rec.finalize(INFINITY);
    return rec;
}

VerificationRecord check_bmo_tail(const GridFunction& f, const DyadicCube& q) {
    const GridConfig& cfg = f.config();
    const double norm = bmo_norm(f, cached_basis(0, cfg.dim)).value;
    if (norm == 0.0) throw DomainError("f has zero BMO norm (constant)");
    const double fq = average(f, q);
    std::vector<double> g(cfg.cells(), 0.0);
    for (std::size_t c : q.cells(cfg)) g[c] = std::abs(f[c] - fq) / norm;
    const auto surv = survival_function(GridFunction(cfg, std::move(g)), q);
    VerificationRecord rec;
    rec.theorem = "bmo_tail";
    base_inputs(rec, q, cfg.dim);
    double worst = 0.0;
    for (const auto& pt : surv)
        if (pt.t > 0.0 && pt.mass > 0.0) worst = std::max(worst, pt.t / std::log(2.0 / pt.mass));
    rec.lhs = worst;
    rec.finalize(INFINITY);
    return rec;
}

}  // namespace jnkit
