#include "jnkit/polybmo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace jnkit {

namespace {

// Normalized inner product of two monomials on [0,1]^n.
long double monomial_moment(const std::array<int, kMaxDim>& a, const std::array<int, kMaxDim>& b, int dim) {
    long double m = 1.0L / (a[0] + b[0] + 1);
    if (dim == 2) m /= (a[1] + b[1] + 1);
    return m;
}

long double inner(const std::vector<long double>& u, const std::vector<long double>& v,
                  const std::vector<std::array<int, kMaxDim>>& ex, int dim) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] == 0.0L) continue;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] != 0.0L) s += u[i] * v[j] * monomial_moment(ex[i], ex[j], dim);
        }
    }
    return s;
}

// Three-point Gauss-Legendre rule on [0,1]; exact through degree 5.
constexpr std::array<double, 3> kGaussNodes{0.11270166537925831148, 0.5, 0.88729833462074168852};
constexpr std::array<double, 3> kGaussWeights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Mean of u^a over [lo, lo + h].
double monomial_cell_mean(int a, double lo, double h) {
    double s = 0.0;
    for (std::size_t q = 0; q < 3; ++q) s += kGaussWeights[q] * std::pow(lo + h * kGaussNodes[q], a);
    return s;
}

}  // namespace

double PolynomialBasis::evaluate(std::size_t j, double x, double y) const {
    double v = 0.0;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        const double c = coefficients[j][i];
        if (c == 0.0) continue;
        double t = c * std::pow(x, exponents[i][0]);
        if (dim == 2) t *= std::pow(y, exponents[i][1]);
        v += t;
    }
    return v;
}

double PolynomialBasis::evaluate_combination(std::span<const double> c, double x, double y) const {
    double v = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) v += c[j] * evaluate(j, x, y);
    return v;
}

std::vector<std::vector<double>> PolynomialBasis::gram() const {
    const std::size_t m = size();
    std::vector<std::vector<double>> g(m, std::vector<double>(m));
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            long double s = 0.0L;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j)
                    s += static_cast<long double>(coefficients[a][i]) * coefficients[b][j] *
                         monomial_moment(exponents[i], exponents[j], dim);
            g[a][b] = static_cast<double>(s);
        }
    }
    return g;
}

PolynomialBasis orthonormal_basis(int degree, int dim) {
    if (degree < 0 || degree > kMaxPolynomialDegree) throw DomainError("polynomial degree must be in [0, 4]");
    if (dim < 1 || dim > kMaxDim) throw DomainError("polynomial dimension must be 1 or 2");
    PolynomialBasis b;
    b.degree = degree;
    b.dim = dim;
    for (int d = 0; d <= degree; ++d) {
        if (dim == 1) {
            b.exponents.push_back({d, 0});
        } else {
            for (int a = d; a >= 0; --a) b.exponents.push_back({a, d - a});
        }
    }
    const std::size_t m = b.exponents.size();
    std::vector<std::vector<long double>> q;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<long double> v(m, 0.0L);
        v[i] = 1.0L;
        // Two passes of modified Gram-Schmidt.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : q) {
                const long double c = inner(v, e, b.exponents, dim);
                for (std::size_t t = 0; t < m; ++t) v[t] -= c * e[t];
            }
        }
        const long double norm = std::sqrt(inner(v, v, b.exponents, dim));
        if (!(norm > 1e-12L)) throw InvariantError("monomials lost rank during Gram-Schmidt");
        for (auto& t : v) t /= norm;
        q.push_back(std::move(v));
    }
    for (const auto& e : q) {
        std::vector<double> c(m);
        std::transform(e.begin(), e.end(), c.begin(), [](long double x) { return static_cast<double>(x); });
        b.coefficients.push_back(std::move(c));
    }
    b.gamma = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> unit(m, 0.0);
        unit[j] = 1.0;
        b.sup_norms.push_back(polynomial_sup(b, unit));
        b.gamma += b.sup_norms.back() * b.sup_norms.back();
    }
    return b;
}

const PolynomialBasis& cached_basis(int degree, int dim) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<PolynomialBasis>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{degree, dim}];
    if (!slot) slot = std::make_unique<PolynomialBasis>(orthonormal_basis(degree, dim));
    return *slot;
}

double polynomial_sup(const PolynomialBasis& basis, std::span<const double> coeffs) {
    const int samples = basis.dim == 1 ? 4096 : 128;
    auto value = [&](double x, double y) { return std::abs(basis.evaluate_combination(coeffs, x, y)); };

    struct Candidate {
        double v, x, y;
    };
    std::vector<Candidate> cands;
    const int ny = basis.dim == 2 ? samples : 0;
    for (int iy = 0; iy <= ny; ++iy) {
        for (int ix = 0; ix <= samples; ++ix) {
            const double x = static_cast<double>(ix) / samples;
            const double y = basis.dim == 2 ? static_cast<double>(iy) / samples : 0.0;
            cands.push_back({value(x, y), x, y});
        }
    }
    const std::size_t keep = std::min<std::size_t>(8, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                      [](const Candidate& a, const Candidate& b) { return a.v > b.v; });
    double best = cands.front().v;
    for (std::size_t c = 0; c < keep; ++c) {
        Candidate cur = cands[c];
        double step = 1.0 / samples;
        while (step > 1e-13) {
            bool moved = false;
            for (int dir = 0; dir < 2 * basis.dim; ++dir) {
                const double sgn = (dir % 2) ? -1.0 : 1.0;
                double x = cur.x, y = cur.y;
                (dir < 2 ? x : y) += sgn * step;
                x = std::clamp(x, 0.0, 1.0);
                y = basis.dim == 2 ? std::clamp(y, 0.0, 1.0) : 0.0;
                const double v = value(x, y);
                if (v > cur.v) {
                    cur = {v, x, y};
                    moved = true;
                }
            }
            if (!moved) step /= 2;
        }
        best = std::max(best, cur.v);
    }
    return best;
}

double gamma_constant(const PolynomialBasis& basis) { return basis.gamma; }

// ---------------------------------------------------------------------------

ProjectionTable::ProjectionTable(const PolynomialBasis& basis, std::size_t cells_per_side)
    : side_(cells_per_side), cells_(basis.dim == 1 ? cells_per_side : cells_per_side * cells_per_side) {
    const double h = 1.0 / static_cast<double>(side_);
    const int max_deg = basis.degree;
    // axis_means[a][i] = mean of u^a over local slab i.
    std::vector<std::vector<double>> axis_means(max_deg + 1, std::vector<double>(side_));
    for (int a = 0; a <= max_deg; ++a)
        for (std::size_t i = 0; i < side_; ++i) axis_means[a][i] = monomial_cell_mean(a, i * h, h);

    means_.assign(basis.size(), std::vector<double>(cells_, 0.0));
    for (std::size_t j = 0; j < basis.size(); ++j) {
        for (std::size_t c = 0; c < cells_; ++c) {
            const std::size_t ix = c % side_;
            const std::size_t iy = c / side_;
            double s = 0.0;
            for (std::size_t t = 0; t < basis.exponents.size(); ++t) {
                const double coef = basis.coefficients[j][t];
                if (coef == 0.0) continue;
                double term = coef * axis_means[basis.exponents[t][0]][ix];
                if (basis.dim == 2) term *= axis_means[basis.exponents[t][1]][iy];
                s += term;
            }
            means_[j][c] = s;
        }
    }
}

std::vector<double> ProjectionTable::coefficients(std::span<const double> local_values) const {
    std::vector<double> c(means_.size(), 0.0);
    const double inv = 1.0 / static_cast<double>(cells_);
    for (std::size_t j = 0; j < means_.size(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < cells_; ++i) s += local_values[i] * means_[j][i];
        c[j] = s * inv;
    }
    return c;
}

std::vector<double> ProjectionTable::evaluate(std::span<const double> coeffs) const {
    std::vector<double> v(cells_, 0.0);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        if (coeffs[j] == 0.0) continue;
        for (std::size_t i = 0; i < cells_; ++i) v[i] += coeffs[j] * means_[j][i];
    }
    return v;
}

const ProjectionTable& Projector::table(std::size_t cells_per_side) const {
    std::lock_guard lock(mutex_);
    auto& slot = tables_[cells_per_side];
    if (!slot) slot = std::make_unique<ProjectionTable>(*basis_, cells_per_side);
    return *slot;
}

// ---------------------------------------------------------------------------

std::vector<double> gather(const GridFunction& f, const DyadicCube& q) {
    const auto cells = q.cells(f.config());
    std::vector<double> v(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) v[i] = f[cells[i]];
    return v;
}

namespace {

void check_basis(const GridFunction& f, const PolynomialBasis& basis) {
    if (basis.dim != f.config().dim) throw DomainError("basis dimension does not match the grid");
}

std::size_t cube_side_cells(const GridConfig& cfg, const DyadicCube& q) {
    return std::size_t{1} << (cfg.depth - q.level);
}

}  // namespace

Projection project(const GridFunction& f, const DyadicCube& q, const PolynomialBasis& basis) {
    check_basis(f, basis);
    const ProjectionTable table(basis, cube_side_cells(f.config(), q));
    const auto local = gather(f, q);
    Projection out;
    out.coefficients = table.coefficients(local);
    out.cell_values = table.evaluate(out.coefficients);
    std::vector<double> full(f.size(), 0.0);
    const auto cells = q.cells(f.config());
    for (std::size_t i = 0; i < cells.size(); ++i) full[cells[i]] = out.cell_values[i];
    out.field = GridFunction(f.config(), std::move(full));
    return out;
}

std::vector<double> reproject(const PolynomialBasis& basis, std::span<const double> coeffs, const DyadicCube& from,
                              const DyadicCube& to) {
    if (coeffs.size() != basis.size()) throw DomainError("coefficient count does not match the basis");
    // Five-point Gauss-Legendre on [0, 1]; exact through degree 9 >= 2 kMaxPolynomialDegree.
    static constexpr double node[5] = {0.04691007703066800, 0.23076534494715845, 0.5, 0.76923465505284155,
                                       0.95308992296933200};
    static constexpr double weight[5] = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                         0.23931433524968324, 0.11846344252809454};
    const int dim = basis.dim;
    const double lf = from.side_length(), lt = to.side_length();
    const double fx = from.index[0] * lf, fy = from.index[1] * lf;
    const double tx = to.index[0] * lt, ty = to.index[1] * lt;
    std::vector<double> out(basis.size(), 0.0);
    for (int b = 0; b < (dim == 2 ? 5 : 1); ++b) {
        for (int a = 0; a < 5; ++a) {
            const double u = node[a], v = dim == 2 ? node[b] : 0.0;
            const double wq = weight[a] * (dim == 2 ? weight[b] : 1.0);
            const double x = tx + lt * u, y = ty + lt * v;
            const double pi = basis.evaluate_combination(coeffs, (x - fx) / lf, dim == 2 ? (y - fy) / lf : 0.0);
            for (std::size_t l = 0; l < basis.size(); ++l) out[l] += wq * pi * basis.evaluate(l, u, v);
        }
    }
    return out;
}

double projection_bound_ratio(const GridFunction& f, const DyadicCube& q, const PolynomialBasis& basis) {
    const auto local = gather(f, q);
    double mean_abs = 0.0;
    for (double v : local) mean_abs += std::abs(v);
    mean_abs /= static_cast<double>(local.size());
    const bool all_zero = std::all_of(local.begin(), local.end(), [](double v) { return v == 0.0; });
    if (all_zero) return 0.0;
    if (!(mean_abs > 0.0)) throw InvariantError("non-zero function with zero mean absolute value");
    const Projection p = project(f, q, basis);
    return polynomial_sup(basis, p.coefficients) / mean_abs;
}

double osc_k(const GridFunction& f, const DyadicCube& q, const PolynomialBasis& basis) {
    check_basis(f, basis);
    const ProjectionTable table(basis, cube_side_cells(f.config(), q));
    const auto local = gather(f, q);
    const auto proj = table.evaluate(table.coefficients(local));
    double s = 0.0;
    for (std::size_t i = 0; i < local.size(); ++i) s += std::abs(local[i] - proj[i]);
    return s / static_cast<double>(local.size());
}

NormWithWitness bmo_norm(const GridFunction& f, const PolynomialBasis& basis, std::optional<WeightedBy> weighting) {
    check_basis(f, basis);
    const GridConfig& cfg = f.config();
    std::optional<DyadicSums> bump_sums;
    double r = 1.0;
    if (weighting) {
        if (!weighting->weight || !weighting->weight->is_weight()) throw DomainError("bmo_norm weighting needs a weight");
        r = weighting->r;
        if (!(r >= 1.0)) throw DomainError("bump exponent r must be >= 1");
        const GridFunction wr = weighting->weight->map([r](double v) { return std::pow(v, r); });
        bump_sums.emplace(cfg, wr.values());
    }
    Projector projector(basis);
    NormWithWitness best{0.0, DyadicCube::root()};
    for_each_cube(cfg, DyadicCube::root(), [&](const DyadicCube& q) {
        const auto& table = projector.table(cube_side_cells(cfg, q));
        const auto local = gather(f, q);
        const auto proj = table.evaluate(table.coefficients(local));
        double s = 0.0;
        for (std::size_t i = 0; i < local.size(); ++i) s += std::abs(local[i] - proj[i]);
        // (1/|Q|) int_Q = mean over cells; (1/w_r(Q)) int_Q = mean / (avg w^r)^(1/r)
        double value = s / static_cast<double>(local.size());
        if (bump_sums) value /= std::pow(bump_sums->average(q), 1.0 / r);
        if (value > best.value) best = {value, q};
    });
    return best;
}

// ---------------------------------------------------------------------------

namespace {

// argmin_t sum_i |r_i - t a_i|: weighted median of r_i / a_i with weights |a_i|.
double l1_line_minimizer(std::span<const double> r, std::span<const double> a) {
    std::vector<std::pair<double, double>> pts;
    double total = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (a[i] == 0.0) continue;
        pts.emplace_back(r[i] / a[i], std::abs(a[i]));
        total += std::abs(a[i]);
    }
    if (pts.empty()) return 0.0;
    std::sort(pts.begin(), pts.end());
    double acc = 0.0;
    for (const auto& [t, wgt] : pts) {
        acc += wgt;
        if (acc >= total / 2) return t;
    }
    return pts.back().first;
}

double mean_abs_residual(std::span<const double> f, const ProjectionTable& table, std::span<const double> c) {
    const auto p = table.evaluate(c);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::abs(f[i] - p[i]);
    return s / static_cast<double>(f.size());
}

}  // namespace

OptimalityReport optimality_check(const GridFunction& f, const DyadicCube& q, const PolynomialBasis& basis) {
    check_basis(f, basis);
    const ProjectionTable table(basis, cube_side_cells(f.config(), q));
    const auto local = gather(f, q);
    const auto proj_coeffs = table.coefficients(local);

    OptimalityReport rep;
    rep.bound = 1.0 + basis.gamma;
    rep.osc = mean_abs_residual(local, table, proj_coeffs);

    auto descend = [&](std::vector<double> c) {
        double cur = mean_abs_residual(local, table, c);
        const std::size_t m = c.size();
        std::vector<double> col(local.size()), resid(local.size());
        for (int sweep = 0; sweep < 200; ++sweep) {
            const double before = cur;
            for (std::size_t j = 0; j < m; ++j) {
                const auto p = table.evaluate(c);
                for (std::size_t i = 0; i < local.size(); ++i) {
                    col[i] = table.mean(j, i);
                    resid[i] = local[i] - (p[i] - c[j] * col[i]);
                }
                const double saved = c[j];
                c[j] = l1_line_minimizer(resid, col);
                const double v = mean_abs_residual(local, table, c);
                if (v <= cur) {
                    cur = v;
                } else {
                    c[j] = saved;
                }
            }
            if (before - cur <= 1e-15 * (1.0 + before)) break;
        }
        return cur;
    };

    rep.best = std::min(rep.osc, descend(proj_coeffs));
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int start = 0; start < 4; ++start) {
        auto c = proj_coeffs;
        for (auto& v : c) v += noise(rng) * (rep.osc + 1e-3);
        rep.best = std::min(rep.best, descend(c));
    }
    const double floor = 1e-12 * (1.0 + std::abs(proj_coeffs.empty() ? 0.0 : proj_coeffs[0]));
    if (rep.osc <= floor && rep.best <= floor) {
        rep.osc = 0.0;
        rep.best = 0.0;
        rep.ratio = 1.0;
    } else {
        rep.ratio = rep.best > 0.0 ? rep.osc / rep.best : INFINITY;
    }
    rep.pass = rep.osc <= rep.bound * rep.best || (rep.osc == 0.0);
    return rep;
}

}  // namespace jnkit
