#include "jnkit/maximal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "jnkit/text.hpp"
#include "jnkit/weights.hpp"

namespace jnkit {

const char* to_string(Scope s) { return s == Scope::dyadic ? "dyadic" : "shifted"; }

Scope parse_scope(const std::string& s) {
    if (s == "dyadic") return Scope::dyadic;
    if (s == "shifted") return Scope::shifted;
    throw DomainError("scope must be 'dyadic' or 'shifted', got '" + s + "'");
}

namespace {

// Visits the subtree of q parents first, carrying max(value(R)) down to cells.
void top_down_max(const GridConfig& cfg, const DyadicCube& r, double running,
                  const std::function<double(const DyadicCube&)>& value, std::vector<double>& out) {
    const double m = std::max(running, value(r));
    if (r.level == cfg.depth) {
        out[r.cells(cfg).front()] = m;
        return;
    }
    for (unsigned c = 0; c < cfg.children_per_cube(); ++c) top_down_max(cfg, r.child(cfg.dim, c), m, value, out);
}

double max_abs_on(const GridFunction& f, const DyadicCube& q) {
    double m = 0.0;
    for (std::size_t c : q.cells(f.config())) m = std::max(m, std::abs(f[c]));
    return m;
}

// Mean |v - P v| for values laid out on a cube with `side` cells per axis.
double oscillation_of(std::span<const double> local, std::size_t side, int degree, const Projector* projector) {
    const double n = static_cast<double>(local.size());
    double s = 0.0;
    if (degree == 0) {
        double mean = 0.0;
        for (double v : local) mean += v;
        mean /= n;
        for (double v : local) s += std::abs(v - mean);
    } else {
        const auto& table = projector->table(side);
        const auto proj = table.evaluate(table.coefficients(local));
        for (std::size_t i = 0; i < local.size(); ++i) s += std::abs(local[i] - proj[i]);
    }
    return s / n;
}

double floored(double v, double floor) { return v <= floor ? 0.0 : v; }

// avg_R |f - P_R f| for a dyadic cube of the base grid; the single code path
// used by every scope so that coinciding cubes give identical values.
double dyadic_oscillation(const GridFunction& f, const DyadicCube& r, int degree, const Projector* projector,
                          double floor) {
    const auto local = gather(f, r);
    const std::size_t side = std::size_t{1} << (f.config().depth - r.level);
    return floored(oscillation_of(local, side, degree, projector), floor);
}

std::vector<double> lattice_gather(const LatticeField& field, const LatticeCube& c) {
    std::vector<double> v;
    const std::size_t s = static_cast<std::size_t>(c.side);
    v.reserve(field.dim == 1 ? s : s * s);
    if (field.dim == 1) {
        for (std::size_t i = 0; i < s; ++i) v.push_back(field.values[c.origin[0] + i]);
    } else {
        for (std::size_t y = 0; y < s; ++y)
            for (std::size_t x = 0; x < s; ++x)
                v.push_back(field.values[(c.origin[1] + y) * field.side + c.origin[0] + x]);
    }
    return v;
}

template <typename Fn>
void for_lattice_cells(const LatticeField& field, const LatticeCube& c, Fn&& fn) {
    const std::size_t s = static_cast<std::size_t>(c.side);
    if (field.dim == 1) {
        for (std::size_t i = 0; i < s; ++i) fn(c.origin[0] + i);
    } else {
        for (std::size_t y = 0; y < s; ++y)
            for (std::size_t x = 0; x < s; ++x) fn((c.origin[1] + y) * field.side + c.origin[0] + x);
    }
}

// Maps a lattice cube back to a base dyadic cube when it is one.
std::optional<DyadicCube> as_dyadic(const LatticeCube& c, const GridConfig& cfg, long p) {
    if (c.side % p != 0) return std::nullopt;
    const long base_side = c.side / p;
    if ((base_side & (base_side - 1)) != 0) return std::nullopt;
    const int level = cfg.depth - std::countr_zero(static_cast<unsigned long>(base_side));
    if (level < 0) return std::nullopt;
    DyadicCube q{level, {0, 0}};
    for (int d = 0; d < cfg.dim; ++d) {
        if (c.origin[d] % c.side != 0) return std::nullopt;
        q.index[d] = static_cast<std::uint32_t>(c.origin[d] / c.side);
    }
    return q;
}

struct LatticeRegion {
    long origin[2];
    long side;
};

LatticeRegion refined_region(const DyadicCube& q, const GridConfig& cfg, long p) {
    const long side = p << (cfg.depth - q.level);
    return {{static_cast<long>(q.index[0]) * side, cfg.dim == 2 ? static_cast<long>(q.index[1]) * side : 0}, side};
}

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }

// Calls fn(cube) for every cube of system j at levels [min_level, J] lying inside the region.
template <typename Fn>
void for_system_cubes_inside(const ShiftedLatticeSystem& sys, std::size_t j, const LatticeRegion& region,
                             int min_level, Fn&& fn) {
    const GridConfig& cfg = sys.base;
    const long p = sys.denominator;
    const long off = sys.offset(j);
    for (int lvl = std::max(min_level, 0); lvl <= cfg.depth; ++lvl) {
        const long L = p << (cfg.depth - lvl);
        if (L > region.side) continue;
        long lo[2], hi[2];
        for (int d = 0; d < 2; ++d) {
            if (d >= cfg.dim) {
                lo[d] = hi[d] = 0;
                continue;
            }
            lo[d] = ceil_div(region.origin[d] - off, L);
            hi[d] = floor_div(region.origin[d] + region.side - L - off, L);
        }
        for (long my = lo[1]; my <= hi[1]; ++my) {
            for (long mx = lo[0]; mx <= hi[0]; ++mx) {
                LatticeCube c;
                c.origin = {off + mx * L, cfg.dim == 2 ? off + my * L : 0};
                c.side = L;
                fn(c, lvl);
            }
        }
    }
}

std::unique_ptr<Projector> make_projector(int degree, int dim) {
    if (degree < 0) throw DomainError("polynomial degree must be non-negative");
    if (degree == 0) return nullptr;
    return std::make_unique<Projector>(cached_basis(degree, dim));
}

}  // namespace

GridFunction local_dyadic_maximal(const GridFunction& h, const DyadicCube& q) {
    const GridConfig& cfg = h.config();
    const GridFunction a = h.map([](double v) { return std::abs(v); });
    const DyadicSums sums(cfg, a.values());
    std::vector<double> out(cfg.cells(), 0.0);
    top_down_max(cfg, q, 0.0, [&](const DyadicCube& r) { return sums.average(r); }, out);
    return GridFunction(cfg, std::move(out));
}

GridFunction sharp_maximal(const GridFunction& f, const DyadicCube& q, int degree, Scope scope) {
    const GridConfig& cfg = f.config();
    if (scope == Scope::shifted) {
        const LatticeField field = shifted_sharp_field(f, q, degree);
        const int p = shift_denominator(cfg.dim);
        GridFunction coarse = coarsen_min(field, cfg, p);
        // Cells outside Q are zero in the lattice field already.
        return coarse;
    }
    const auto projector = make_projector(degree, cfg.dim);
    const double floor = kOscillationFloor * max_abs_on(f, q);
    std::vector<double> out(cfg.cells(), 0.0);
    top_down_max(
        cfg, q, 0.0, [&](const DyadicCube& r) { return dyadic_oscillation(f, r, degree, projector.get(), floor); },
        out);
    return GridFunction(cfg, std::move(out));
}

LatticeField shifted_sharp_field(const GridFunction& f, const DyadicCube& q, int degree) {
    const GridConfig& cfg = f.config();
    const ShiftedLatticeSystem sys = shifted_systems(cfg);
    const long p = sys.denominator;
    const auto projector = make_projector(degree, cfg.dim);
    const double floor = kOscillationFloor * max_abs_on(f, q);
    const LatticeField fine = refine(f, static_cast<int>(p));
    LatticeField out{cfg.dim, fine.side, std::vector<double>(fine.values.size(), 0.0)};
    const LatticeRegion region = refined_region(q, cfg, p);
    for (std::size_t j = 0; j < sys.systems(); ++j) {
        for_system_cubes_inside(sys, j, region, q.level, [&](const LatticeCube& c, int) {
            double value;
            if (auto dq = (j == 0) ? as_dyadic(c, cfg, p) : std::nullopt) {
                value = dyadic_oscillation(f, *dq, degree, projector.get(), floor);
            } else {
                const auto local = lattice_gather(fine, c);
                value = floored(oscillation_of(local, static_cast<std::size_t>(c.side), degree, projector.get()), floor);
            }
            for_lattice_cells(out, c, [&](std::size_t i) { out.values[i] = std::max(out.values[i], value); });
        });
    }
    return out;
}

std::vector<LatticeField> system_maximal_fields(const GridFunction& h) {
    const GridConfig& cfg = h.config();
    const ShiftedLatticeSystem sys = shifted_systems(cfg);
    const long p = sys.denominator;
    const LatticeField fine = refine(h.map([](double v) { return std::abs(v); }), static_cast<int>(p));
    const long M = static_cast<long>(fine.side);
    std::vector<LatticeField> out;
    for (std::size_t j = 0; j < sys.systems(); ++j) {
        LatticeField field{cfg.dim, fine.side, std::vector<double>(fine.values.size(), 0.0)};
        const long off = sys.offset(j);
        for (int lvl = 0; lvl <= cfg.depth; ++lvl) {
            const long L = p << (cfg.depth - lvl);
            const long m_lo = floor_div(-off, L), m_hi = floor_div(M - 1 - off, L);
            const long y_lo = cfg.dim == 2 ? m_lo : 0, y_hi = cfg.dim == 2 ? m_hi : 0;
            const double volume = std::pow(static_cast<double>(L), cfg.dim);
            for (long my = y_lo; my <= y_hi; ++my) {
                for (long mx = m_lo; mx <= m_hi; ++mx) {
                    // Clip the system cube to the ambient lattice; h vanishes outside.
                    const long x0 = std::max(0L, off + mx * L), x1 = std::min(M, off + (mx + 1) * L);
                    const long yy0 = cfg.dim == 2 ? std::max(0L, off + my * L) : 0;
                    const long yy1 = cfg.dim == 2 ? std::min(M, off + (my + 1) * L) : 1;
                    double s = 0.0;
                    for (long y = yy0; y < yy1; ++y)
                        for (long x = x0; x < x1; ++x) s += fine.values[y * M * (cfg.dim == 2) + x];
                    const double avg = s / volume;
                    for (long y = yy0; y < yy1; ++y)
                        for (long x = x0; x < x1; ++x) {
                            double& slot = field.values[y * M * (cfg.dim == 2) + x];
                            slot = std::max(slot, avg);
                        }
                }
            }
        }
        out.push_back(std::move(field));
    }
    return out;
}

LatticeField shifted_maximal_field(const GridFunction& h) {
    auto fields = system_maximal_fields(h);
    LatticeField out = fields.front();
    for (std::size_t j = 1; j < fields.size(); ++j)
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = std::max(out.values[i], fields[j].values[i]);
    return out;
}

namespace {

void check_brute_force_size(const GridConfig& cfg) {
    const bool ok = cfg.dim == 1 ? cfg.depth <= 6 : (3L << cfg.depth) * (3L << cfg.depth) <= 2304;
    if (!ok) throw DomainError("brute-force oracle is limited to J <= 6 (n = 1) or J <= 4 (n = 2)");
}

}  // namespace

LatticeField brute_force_sharp(const GridFunction& f, const DyadicCube& q, int degree) {
    const GridConfig& cfg = f.config();
    check_brute_force_size(cfg);
    const long p = shift_denominator(cfg.dim);
    const auto projector = make_projector(degree, cfg.dim);
    const double floor = kOscillationFloor * max_abs_on(f, q);
    const LatticeField fine = refine(f, static_cast<int>(p));
    LatticeField out{cfg.dim, fine.side, std::vector<double>(fine.values.size(), 0.0)};
    const LatticeRegion region = refined_region(q, cfg, p);
    for (long s = 1; s <= region.side; ++s) {
        const long positions = region.side - s + 1;
        const long ny = cfg.dim == 2 ? positions : 1;
        for (long oy = 0; oy < ny; ++oy) {
            for (long ox = 0; ox < positions; ++ox) {
                LatticeCube c;
                c.origin = {region.origin[0] + ox, cfg.dim == 2 ? region.origin[1] + oy : 0};
                c.side = s;
                double value;
                if (auto dq = as_dyadic(c, cfg, p)) {
                    value = dyadic_oscillation(f, *dq, degree, projector.get(), floor);
                } else {
                    const auto local = lattice_gather(fine, c);
                    value = floored(oscillation_of(local, static_cast<std::size_t>(s), degree, projector.get()), floor);
                }
                for_lattice_cells(out, c, [&](std::size_t i) { out.values[i] = std::max(out.values[i], value); });
            }
        }
    }
    return out;
}

LatticeField brute_force_maximal(const GridFunction& h) {
    const GridConfig& cfg = h.config();
    check_brute_force_size(cfg);
    const long p = shift_denominator(cfg.dim);
    const LatticeField fine = refine(h.map([](double v) { return std::abs(v); }), static_cast<int>(p));
    const long M = static_cast<long>(fine.side);
    LatticeField out{cfg.dim, fine.side, std::vector<double>(fine.values.size(), 0.0)};
    // Summed-area table with one row/column of zero padding.
    const long W = M + 1;
    const long H = cfg.dim == 2 ? M + 1 : 2;
    std::vector<double> sat(static_cast<std::size_t>(W * H), 0.0);
    for (long y = 0; y + 1 < H; ++y)
        for (long x = 0; x < M; ++x)
            sat[(y + 1) * W + x + 1] = fine.values[y * M * (cfg.dim == 2) + x] + sat[y * W + x + 1] +
                                       sat[(y + 1) * W + x] - sat[y * W + x];
    for (long s = 1; s <= M; ++s) {
        const long positions = M - s + 1;
        const long ny = cfg.dim == 2 ? positions : 1;
        const long sy = cfg.dim == 2 ? s : 1;
        const double volume = std::pow(static_cast<double>(s), cfg.dim);
        for (long oy = 0; oy < ny; ++oy) {
            for (long ox = 0; ox < positions; ++ox) {
                const double sum = sat[(oy + sy) * W + ox + s] - sat[oy * W + ox + s] - sat[(oy + sy) * W + ox] +
                                   sat[oy * W + ox];
                LatticeCube c;
                c.origin = {ox, oy};
                c.side = s;
                const double avg = sum / volume;
                for_lattice_cells(out, c, [&](std::size_t i) { out.values[i] = std::max(out.values[i], avg); });
            }
        }
    }
    return out;
}

double lattice_covering_ratio(const ShiftedLatticeSystem& sys) {
    const GridConfig& cfg = sys.base;
    const long p = sys.denominator;
    const long M = static_cast<long>(sys.refined_side());
    double worst = 1.0;
    for (long s = 1; s <= M; ++s) {
        const long positions = M - s + 1;
        const long ny = cfg.dim == 2 ? positions : 1;
        for (long oy = 0; oy < ny; ++oy) {
            for (long ox = 0; ox < positions; ++ox) {
                const long a[2] = {ox, oy};
                long best = std::numeric_limits<long>::max();
                for (std::size_t j = 0; j < sys.systems(); ++j) {
                    const long off = sys.offset(j);
                    for (int lvl = cfg.depth; lvl >= 0; --lvl) {
                        const long L = p << (cfg.depth - lvl);
                        if (L < s) continue;
                        if (L >= best) break;
                        bool ok = true;
                        for (int d = 0; d < cfg.dim && ok; ++d)
                            ok = floor_div(a[d] - off, L) == floor_div(a[d] + s - 1 - off, L);
                        if (ok) {
                            best = L;
                            break;
                        }
                    }
                }
                worst = std::max(worst, static_cast<double>(best) / static_cast<double>(s));
            }
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------

bool CZDecomposition::all_checked_hold() const {
    return std::all_of(certificates.begin(), certificates.end(),
                       [](const CZCertificate& c) { return !c.checked || c.holds; });
}

double CZDecomposition::selected_volume(int dim) const {
    double v = 0.0;
    for (const auto& c : cubes) v += c.volume(dim);
    return v;
}

namespace {

// Maximal strict descendants of q satisfying `stops`, in depth-first order.
void select_maximal(const GridConfig& cfg, const DyadicCube& r, const std::function<bool(const DyadicCube&)>& stops,
                    std::vector<DyadicCube>& out) {
    if (r.level == cfg.depth) return;
    for (unsigned c = 0; c < cfg.children_per_cube(); ++c) {
        const DyadicCube ch = r.child(cfg.dim, c);
        if (stops(ch)) {
            out.push_back(ch);
        } else {
            select_maximal(cfg, ch, stops, out);
        }
    }
}

std::vector<char> union_mask(const GridConfig& cfg, const std::vector<DyadicCube>& cubes) {
    std::vector<char> in(cfg.cells(), 0);
    for (const auto& c : cubes)
        for (std::size_t cell : c.cells(cfg)) in[cell] = 1;
    return in;
}

}  // namespace

CZDecomposition cz_decompose(const GridFunction& h, const DyadicCube& q, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("CZ height must be positive");
    const GridConfig& cfg = h.config();
    const GridFunction a = h.map([](double v) { return std::abs(v); });
    const DyadicSums sums(cfg, a.values());

    CZDecomposition cz;
    cz.base = q;
    cz.height = lambda;
    cz.mode = CZMode::lebesgue;
    const double root_avg = sums.average(q);
    cz.root_triggers = root_avg > lambda;
    select_maximal(cfg, q, [&](const DyadicCube& r) { return sums.average(r) > lambda; }, cz.cubes);
    for (const auto& c : cz.cubes) cz.cube_averages.push_back(sums.average(c));

    const double two_n = static_cast<double>(cfg.children_per_cube());
    CZCertificate lower{"lambda < avg_Qj|h|", true, true, 0.0, lambda};
    CZCertificate upper{"avg_Qj|h| <= 2^n lambda", !cz.root_triggers, true, 0.0, two_n * lambda};
    for (double avg : cz.cube_averages) {
        if (!(lambda < avg)) lower.holds = false;
        if (!(avg <= two_n * lambda)) upper.holds = false;
        upper.lhs = std::max(upper.lhs, avg);
    }
    lower.lhs = cz.cube_averages.empty() ? INFINITY : *std::min_element(cz.cube_averages.begin(), cz.cube_averages.end());

    // lambda * sum |Q_j| <= int_Q |h|
    CZCertificate total{"lambda sum|Qj| <= int_Q|h|", true, true, lambda * cz.selected_volume(cfg.dim),
                        sums.integral(q)};
    total.holds = total.lhs <= total.rhs;

    CZCertificate off{"M_Q h <= lambda off the union", !cz.root_triggers, true, 0.0, lambda};
    const GridFunction mq = local_dyadic_maximal(h, q);
    const auto in = union_mask(cfg, cz.cubes);
    for (std::size_t cell : q.cells(cfg)) {
        if (in[cell]) continue;
        off.lhs = std::max(off.lhs, mq[cell]);
    }
    off.holds = off.lhs <= lambda;
    cz.certificates = {lower, upper, total, off};
    return cz;
}

CZDecomposition cz_decompose_bump(const GridFunction& f, const DyadicCube& q, const GridFunction& w, double r,
                                  double L) {
    if (!w.is_weight()) throw DomainError("bump-weighted decomposition needs a weight");
    if (!(r >= 1.0) || !(L > 0.0)) throw DomainError("bump decomposition needs r >= 1 and L > 0");
    const GridConfig& cfg = f.config();
    const double fq = average(f, q);
    const GridFunction g = f.map([fq](double v) { return std::abs(v - fq); });
    const DyadicSums g_sums(cfg, g.values());
    const GridFunction wr = w.map([r](double v) { return std::pow(v, r); });
    const DyadicSums wr_sums(cfg, wr.values());
    auto bump_of = [&](const DyadicCube& c) { return c.volume(cfg.dim) * std::pow(wr_sums.average(c), 1.0 / r); };
    auto stop_value = [&](const DyadicCube& c) { return g_sums.integral(c) / bump_of(c); };

    CZDecomposition cz;
    cz.base = q;
    cz.height = L;
    cz.mode = CZMode::bump_weighted;
    cz.bump_r = r;
    cz.root_triggers = stop_value(q) > L;
    select_maximal(cfg, q, [&](const DyadicCube& c) { return stop_value(c) > L; }, cz.cubes);
    for (const auto& c : cz.cubes) cz.cube_averages.push_back(stop_value(c));

    const double two_n = static_cast<double>(cfg.children_per_cube());
    CZCertificate ancestor{"ancestor: int_{Qj'}|f-f_Q| / w_r(Qj') <= L", true, true, 0.0, L};
    CZCertificate jump{"|f_Qj - f_Q| <= 2^n L (avg_{Qj'} w^r)^{1/r}", true, true, 0.0, 0.0};
    for (const auto& c : cz.cubes) {
        const DyadicCube parent = c.parent();
        if (parent == q && cz.root_triggers) {
            ancestor.checked = false;
            jump.checked = false;
            continue;
        }
        const double a = stop_value(parent);
        ancestor.lhs = std::max(ancestor.lhs, a);
        if (!(a <= L)) ancestor.holds = false;
        const double lhs = std::abs(average(f, c) - fq);
        const double rhs = two_n * L * std::pow(wr_sums.average(parent), 1.0 / r);
        if (!(lhs <= rhs)) jump.holds = false;
        if (lhs - rhs >= jump.lhs - jump.rhs) {
            jump.lhs = lhs;
            jump.rhs = rhs;
        }
    }

    // sum_j w_r(Q_j) <= ||f||_{BMO_{w,r}} w_r(Q) / L
    const NormWithWitness norm = bmo_norm(f, cached_basis(0, cfg.dim), WeightedBy{&w, r});
    double bump_total = 0.0;
    for (const auto& c : cz.cubes) bump_total += bump_of(c);
    CZCertificate sum{"sum w_r(Qj) <= ||f||_BMO(w,r) w_r(Q) / L", true, true, bump_total,
                      norm.value * bump_of(q) / L};
    sum.holds = sum.lhs <= sum.rhs;

    CZCertificate off{"|f - f_Q| <= L w off the union", q.level < cfg.depth, true, 0.0, 0.0};
    const auto in = union_mask(cfg, cz.cubes);
    double worst = -INFINITY;
    for (std::size_t cell : q.cells(cfg)) {
        if (in[cell]) continue;
        const double margin = g[cell] - L * w[cell];
        if (margin > worst) {
            worst = margin;
            off.lhs = g[cell];
            off.rhs = L * w[cell];
        }
    }
    off.holds = worst <= 0.0;
    cz.certificates = {ancestor, jump, sum, off};
    return cz;
}

std::pair<double, double> bump_sum_holder(const CZDecomposition& cz, const GridFunction& w, double r) {
    const int dim = w.config().dim;
    double lhs = 0.0;
    for (const auto& c : cz.cubes) lhs += bump(w, c, r);
    const double fraction = cz.selected_volume(dim) / cz.base.volume(dim);
    const double r_prime = r / (r - 1.0);
    return {lhs, bump(w, cz.base, r) * std::pow(fraction, 1.0 / r_prime)};
}

std::string to_json(const CZDecomposition& cz, int dim) {
    nlohmann::ordered_json j;
    j["base"] = cz.base.to_string(dim);
    j["mode"] = cz.mode == CZMode::lebesgue ? "lebesgue" : "bump-weighted";
    j["height"] = cz.height;
    if (cz.mode == CZMode::bump_weighted) j["r"] = cz.bump_r;
    j["root_triggers"] = cz.root_triggers;
    auto& cubes = j["cubes"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < cz.cubes.size(); ++i) {
        cubes.push_back({{"cube", cz.cubes[i].to_string(dim)},
                         {"level", cz.cubes[i].level},
                         {"stopping_value", cz.cube_averages[i]}});
    }
    auto& certs = j["certificates"] = nlohmann::ordered_json::array();
    for (const auto& c : cz.certificates) {
        certs.push_back({{"name", c.name}, {"checked", c.checked}, {"holds", c.holds}, {"lhs", c.lhs}, {"rhs", c.rhs}});
    }
    j["pass"] = cz.all_checked_hold();
    return j.dump();
}

// ---------------------------------------------------------------------------

RatioField ratio_field(const GridFunction& f, const DyadicCube& q, int degree, Scope scope) {
    const GridConfig& cfg = f.config();
    const double floor = kOscillationFloor * max_abs_on(f, q);
    std::vector<double> resid(cfg.cells(), 0.0);
    const auto cells = q.cells(cfg);
    if (degree == 0) {
        const double fq = average(f, q);
        for (std::size_t c : cells) resid[c] = floored(std::abs(f[c] - fq), floor);
    } else {
        const Projection proj = project(f, q, cached_basis(degree, cfg.dim));
        for (std::size_t i = 0; i < cells.size(); ++i)
            resid[cells[i]] = floored(std::abs(f[cells[i]] - proj.cell_values[i]), floor);
    }
    RatioField rf;
    rf.scope = scope;
    rf.degree = degree;
    rf.numerator = local_dyadic_maximal(GridFunction(cfg, std::move(resid)), q);
    rf.denominator = sharp_maximal(f, q, degree, scope);
    std::vector<double> ratio(cfg.cells(), 0.0);
    for (std::size_t c : cells) {
        const double num = rf.numerator[c];
        const double den = rf.denominator[c];
        if (den == 0.0) {
            if (num > 0.0) throw InvariantError("positive maximal function over a vanishing sharp function");
            ratio[c] = 0.0;
        } else {
            ratio[c] = num / den;
        }
    }
    rf.values = GridFunction(cfg, std::move(ratio));
    return rf;
}

// ---------------------------------------------------------------------------

double measure(const DyadicCube& q, const GridConfig& cfg, const GridFunction* density) {
    if (!density) return q.volume(cfg.dim);
    double s = 0.0;
    for (std::size_t c : q.cells(cfg)) s += (*density)[c];
    return s * cfg.cell_volume();
}

double superlevel_measure(const GridFunction& F, const DyadicCube& q, double t, const GridFunction* density) {
    if (t < 0.0) throw DomainError("superlevel threshold must be non-negative");
    double s = 0.0;
    for (std::size_t c : q.cells(F.config()))
        if (F[c] > t) s += density ? (*density)[c] : 1.0;
    return s * F.config().cell_volume();
}

double lp_norm(const GridFunction& F, const DyadicCube& q, const GridFunction* density, double p, bool normalized) {
    if (!(p > 0.0)) throw DomainError("L^p exponent must be positive");
    double s = 0.0;
    for (std::size_t c : q.cells(F.config())) s += std::pow(std::abs(F[c]), p) * (density ? (*density)[c] : 1.0);
    s *= F.config().cell_volume();
    if (normalized) s /= measure(q, F.config(), density);
    return std::pow(s, 1.0 / p);
}

namespace {

// (value, mass) pairs sorted by value.
std::vector<std::pair<double, double>> value_masses(std::span<const double> values, std::span<const double> density,
                                                    double cell_volume) {
    std::vector<std::pair<double, double>> vm(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        vm[i] = {std::abs(values[i]), (density.empty() ? 1.0 : density[i]) * cell_volume};
    std::sort(vm.begin(), vm.end());
    return vm;
}

std::vector<SurvivalPoint> survival_from(const std::vector<std::pair<double, double>>& vm) {
    double total = 0.0;
    for (const auto& [v, m] : vm) total += m;
    std::vector<SurvivalPoint> out;
    // Mass strictly above the current value, accumulated from the top down.
    std::vector<std::pair<double, double>> distinct;
    for (const auto& [v, m] : vm) {
        if (!distinct.empty() && distinct.back().first == v) {
            distinct.back().second += m;
        } else {
            distinct.emplace_back(v, m);
        }
    }
    std::vector<double> above(distinct.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = distinct.size(); i-- > 0;) {
        above[i] = acc;
        acc += distinct[i].second;
    }
    if (distinct.empty() || distinct.front().first > 0.0) out.push_back({0.0, total > 0 ? acc / total : 0.0});
    for (std::size_t i = 0; i < distinct.size(); ++i) out.push_back({distinct[i].first, above[i] / total});
    return out;
}

}  // namespace

double weak_lorentz_norm(const GridFunction& F, const DyadicCube& q, const GridFunction* density, double r,
                         bool normalized) {
    if (!(r >= 1.0)) throw DomainError("weak Lorentz exponent must be >= 1");
    const auto cells = q.cells(F.config());
    std::vector<double> vals, dens;
    for (std::size_t c : cells) {
        vals.push_back(F[c]);
        if (density) dens.push_back((*density)[c]);
    }
    const auto vm = value_masses(vals, dens, F.config().cell_volume());
    const double total = normalized ? measure(q, F.config(), density) : 1.0;
    // sup_t t mu{|F| > t}^{1/r} is approached as t increases to each value v: mu{|F| >= v}.
    double best = 0.0, at_least = 0.0;
    for (std::size_t i = vm.size(); i-- > 0;) {
        at_least += vm[i].second;
        if (i > 0 && vm[i - 1].first == vm[i].first) continue;
        best = std::max(best, vm[i].first * std::pow(at_least / total, 1.0 / r));
    }
    return best;
}

std::vector<SurvivalPoint> survival_function(const GridFunction& F, const DyadicCube& q, const GridFunction* density) {
    std::vector<double> vals, dens;
    for (std::size_t c : q.cells(F.config())) {
        vals.push_back(F[c]);
        if (density) dens.push_back((*density)[c]);
    }
    return survival_from(value_masses(vals, dens, F.config().cell_volume()));
}

std::vector<SurvivalPoint> survival_function(const LatticeField& F, const LatticeField* density) {
    return survival_from(value_masses(F.values, density ? std::span<const double>(density->values) : std::span<const double>{},
                                      F.cell_volume()));
}

std::string survival_csv(const std::vector<SurvivalPoint>& s) {
    std::ostringstream os;
    os << "t,measure\n";
    for (const auto& pt : s) os << format_double(pt.t) << "," << format_double(pt.mass) << "\n";
    return os.str();
}

}  // namespace jnkit
