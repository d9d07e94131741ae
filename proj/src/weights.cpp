#include "jnkit/weights.hpp"

#include <cmath>
#include <functional>

#include <json.hpp>

namespace jnkit {

namespace {

void require_weight(const GridFunction& w) {
    if (!w.is_weight()) throw DomainError("expected a weight (positive values tagged as weight)");
}

double dual_exponent(double p) { return p / (p - 1.0); }

// Records a candidate, keeping the first maximum in enumeration order.
void consider(WeightConstant& best, double value, const DyadicCube& q, int dim) {
    if (!std::isfinite(value)) {
        best.overflow = true;
        return;
    }
    if (value > best.value || best.witness_label.empty()) {
        best.value = value;
        best.witness = q;
        best.witness_label = q.to_string(dim);
    }
}

// int_R max(running, M_R w) over the dyadic subtree of R.
double maximal_integral(const GridConfig& cfg, const DyadicSums& sums, const DyadicCube& r, double running) {
    const double m = std::max(running, sums.average(r));
    if (r.level == cfg.depth) return m * cfg.cell_volume();
    double s = 0.0;
    for (unsigned c = 0; c < cfg.children_per_cube(); ++c)
        s += maximal_integral(cfg, sums, r.child(cfg.dim, c), m);
    return s;
}

// Summed-area table over a refined lattice field.
struct AreaSums {
    int dim;
    long side;
    std::vector<double> t;

    explicit AreaSums(const LatticeField& f) : dim(f.dim), side(static_cast<long>(f.side)) {
        const long W = side + 1;
        const long H = dim == 2 ? side + 1 : 2;
        t.assign(static_cast<std::size_t>(W * H), 0.0);
        for (long y = 0; y + 1 < H; ++y)
            for (long x = 0; x < side; ++x)
                t[(y + 1) * W + x + 1] = f.values[y * side * (dim == 2) + x] + t[y * W + x + 1] +
                                         t[(y + 1) * W + x] - t[y * W + x];
    }

    double sum(const LatticeCube& c) const {
        const long W = side + 1;
        const long x0 = c.origin[0], x1 = c.origin[0] + c.side;
        const long y0 = dim == 2 ? c.origin[1] : 0, y1 = dim == 2 ? c.origin[1] + c.side : 1;
        return t[y1 * W + x1] - t[y0 * W + x1] - t[y1 * W + x0] + t[y0 * W + x0];
    }
};

// Same recursion on a shifted system's tree; lattice cells have unit volume.
double lattice_maximal_integral(const AreaSums& sums, const LatticeCube& r, long leaf_side, double running) {
    const double vol = std::pow(static_cast<double>(r.side), sums.dim);
    const double m = std::max(running, sums.sum(r) / vol);
    if (r.side == leaf_side) return m * vol;
    const long h = r.side / 2;
    double s = 0.0;
    const int ny = sums.dim == 2 ? 2 : 1;
    for (int dy = 0; dy < ny; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
            LatticeCube c;
            c.origin = {r.origin[0] + dx * h, r.origin[1] + dy * h};
            c.side = h;
            s += lattice_maximal_integral(sums, c, leaf_side, m);
        }
    return s;
}

}  // namespace

double bump(const GridFunction& w, const DyadicCube& q, double r) {
    if (!(r >= 1.0)) throw DomainError("bump exponent must be >= 1");
    const GridConfig& cfg = w.config();
    if (r == 1.0) return average(w, q) * q.volume(cfg.dim);
    const GridFunction wr = w.map([r](double v) { return std::pow(v, r); });
    return q.volume(cfg.dim) * std::pow(average(wr, q), 1.0 / r);
}

WeightConstant ap_constant(const GridFunction& w, double p) {
    require_weight(w);
    if (!(p >= 1.0)) throw DomainError("A_p needs p >= 1");
    const GridConfig& cfg = w.config();
    WeightConstant best;
    if (p == 1.0) {
        const DyadicSums sums(cfg, w.values());
        const GridFunction mw = local_dyadic_maximal(w, DyadicCube::root());
        for (std::size_t cell = 0; cell < cfg.cells(); ++cell) {
            const double ratio = mw[cell] / w[cell];
            if (!std::isfinite(ratio)) {
                best.overflow = true;
                continue;
            }
            if (ratio > best.value || best.witness_label.empty()) {
                // Report the largest cube containing the cell that attains M w.
                DyadicCube q = cube_of_cell(cfg, cell, cfg.depth);
                for (int k = 0; k <= cfg.depth; ++k) {
                    const DyadicCube a = cube_of_cell(cfg, cell, k);
                    if (sums.average(a) == mw[cell]) {
                        q = a;
                        break;
                    }
                }
                best.value = ratio;
                best.witness = q;
                best.witness_label = q.to_string(cfg.dim);
            }
        }
        return best;
    }
    const double e = 1.0 - dual_exponent(p);
    const GridFunction sigma = w.map([e](double v) { return std::pow(v, e); });
    const DyadicSums ws(cfg, w.values());
    const DyadicSums ss(cfg, sigma.values());
    for_each_cube(cfg, DyadicCube::root(), [&](const DyadicCube& q) {
        consider(best, ws.average(q) * std::pow(ss.average(q), p - 1.0), q, cfg.dim);
    });
    return best;
}

WeightConstant ap_bump_constant(const GridFunction& w, double p, double r) {
    require_weight(w);
    if (!(p > 1.0) || !(r >= 1.0)) throw DomainError("A_p^r needs p > 1 and r >= 1");
    const GridConfig& cfg = w.config();
    const double e = 1.0 - dual_exponent(p);
    const GridFunction wr = w.map([r](double v) { return std::pow(v, r); });
    const GridFunction sigma = w.map([e](double v) { return std::pow(v, e); });
    const DyadicSums rs(cfg, wr.values());
    const DyadicSums ss(cfg, sigma.values());
    WeightConstant best;
    for_each_cube(cfg, DyadicCube::root(), [&](const DyadicCube& q) {
        consider(best, std::pow(rs.average(q), 1.0 / r) * std::pow(ss.average(q), p - 1.0), q, cfg.dim);
    });
    return best;
}

WeightConstant ainfty_constant(const GridFunction& w, Scope scope) {
    require_weight(w);
    const GridConfig& cfg = w.config();
    const DyadicSums sums(cfg, w.values());
    WeightConstant best;
    for_each_cube(cfg, DyadicCube::root(), [&](const DyadicCube& q) {
        consider(best, maximal_integral(cfg, sums, q, 0.0) / sums.integral(q), q, cfg.dim);
    });
    if (scope == Scope::dyadic) return best;

    const ShiftedLatticeSystem sys = shifted_systems(cfg);
    const long p = sys.denominator;
    const long M = static_cast<long>(sys.refined_side());
    const AreaSums area(refine(w, static_cast<int>(p)));
    for (std::size_t j = 1; j < sys.systems(); ++j) {
        const long off = sys.offset(j);
        for (int lvl = 0; lvl <= cfg.depth; ++lvl) {
            const long L = p << (cfg.depth - lvl);
            // Origins off + m L with 0 <= off + m L <= M - L on each axis.
            const long m_lo = -(off / L);
            const long room = M - L - off;
            const long m_hi = room >= 0 ? room / L : -((-room + L - 1) / L);
            const long y_lo = cfg.dim == 2 ? m_lo : 0, y_hi = cfg.dim == 2 ? m_hi : 0;
            for (long my = y_lo; my <= y_hi; ++my) {
                for (long mx = m_lo; mx <= m_hi; ++mx) {
                    LatticeCube c;
                    c.origin = {off + mx * L, cfg.dim == 2 ? off + my * L : 0};
                    c.side = L;
                    const double total = area.sum(c);
                    const double value = lattice_maximal_integral(area, c, p, 0.0) / total;
                    if (!std::isfinite(value)) {
                        best.overflow = true;
                        continue;
                    }
                    if (value > best.value) {
                        best.value = value;
                        best.witness_label = "system " + std::to_string(j) + " cube at lattice origin (" +
                                             std::to_string(c.origin[0]) + "," + std::to_string(c.origin[1]) +
                                             ") side " + std::to_string(L) + "/" + std::to_string(M);
                    }
                }
            }
        }
    }
    return best;
}

double cp_denominator(const GridFunction& w, const DyadicCube& q, double p, const DyadicSums& w_sums) {
    const int dim = w.config().dim;
    double total = w_sums.integral(q);
    DyadicCube inner = q;
    const double vq = q.volume(dim);
    while (inner.level > 0) {
        const DyadicCube outer = inner.parent();
        const double shell = w_sums.integral(outer) - w_sums.integral(inner);
        total += std::pow(vq / outer.volume(dim), p) * shell;
        inner = outer;
    }
    return total;
}

WeightConstant cp_constant(const GridFunction& w, double p) {
    require_weight(w);
    if (!(p > 0.0)) throw DomainError("C_p needs p > 0");
    const GridConfig& cfg = w.config();
    const DyadicSums sums(cfg, w.values());
    WeightConstant best;
    for_each_cube(cfg, DyadicCube::root(), [&](const DyadicCube& q) {
        consider(best, maximal_integral(cfg, sums, q, 0.0) / cp_denominator(w, q, p, sums), q, cfg.dim);
    });
    return best;
}

double rhi_delta(RhiMode mode, double constant, double calibration) {
    if (!(constant >= 1.0) || !(calibration > 0.0)) throw DomainError("reverse Hoelder exponent needs K >= 1, c > 0");
    return mode == RhiMode::ainfty ? 1.0 / (calibration * constant) : 1.0 / (calibration * (constant + 1.0));
}

ReverseHolderReport reverse_holder_check(const GridFunction& w, double delta, RhiMode mode, double p) {
    require_weight(w);
    if (!(delta > 0.0)) throw DomainError("reverse Hoelder exponent must be positive");
    const GridConfig& cfg = w.config();
    const DyadicSums sums(cfg, w.values());
    const GridFunction wd = w.map([delta](double v) { return std::pow(v, 1.0 + delta); });
    const DyadicSums dsums(cfg, wd.values());
    ReverseHolderReport rep;
    rep.delta = delta;
    for_each_cube(cfg, DyadicCube::root(), [&](const DyadicCube& q) {
        const double lhs = std::pow(dsums.average(q), 1.0 / (1.0 + delta));
        const double rhs = mode == RhiMode::ainfty ? 2.0 * sums.average(q)
                                                   : 2.0 * cp_denominator(w, q, p, sums) / q.volume(cfg.dim);
        const double ratio = lhs / rhs;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.witness = q;
        }
    });
    rep.pass = rep.max_ratio <= 1.0;
    return rep;
}

WeightReport weight_report(const GridFunction& w, const std::vector<double>& p_list, double bump_r) {
    require_weight(w);
    WeightReport rep;
    rep.bump_r = bump_r;
    for (double p : p_list) {
        rep.ap.emplace_back(p, ap_constant(w, p));
        if (p > 1.0) rep.ap_bump.emplace_back(p, ap_bump_constant(w, p, bump_r));
        rep.cp.emplace_back(p, cp_constant(w, p));
    }
    rep.a1 = ap_constant(w, 1.0);
    rep.ainfty = ainfty_constant(w);
    rep.rhi_ainfty =
        reverse_holder_check(w, rhi_delta(RhiMode::ainfty, rep.ainfty.value, kRhiCalibrationAinfty), RhiMode::ainfty);
    return rep;
}

namespace {

nlohmann::ordered_json constant_json(const WeightConstant& c) {
    nlohmann::ordered_json j;
    if (c.overflow) {
        j["value"] = "overflow";
    } else {
        j["value"] = c.value;
    }
    j["witness"] = c.witness_label;
    return j;
}

}  // namespace

std::string to_json(const WeightReport& rep, int dim) {
    nlohmann::ordered_json j;
    auto list = [](const std::vector<std::pair<double, WeightConstant>>& items) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (const auto& [p, c] : items) {
            auto e = constant_json(c);
            e["p"] = p;
            a.push_back(e);
        }
        return a;
    };
    j["A_p"] = list(rep.ap);
    j["A_1"] = constant_json(rep.a1);
    j["A_infinity"] = constant_json(rep.ainfty);
    j["bump_r"] = rep.bump_r;
    j["A_p^r"] = list(rep.ap_bump);
    j["C_p"] = list(rep.cp);
    j["reverse_holder"] = {{"delta", rep.rhi_ainfty.delta},
                           {"max_ratio", rep.rhi_ainfty.max_ratio},
                           {"witness", rep.rhi_ainfty.witness.to_string(dim)},
                           {"pass", rep.rhi_ainfty.pass}};
    return j.dump();
}

}  // namespace jnkit
