#include "jnkit/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "jnkit/text.hpp"

namespace jnkit {

GridConfig GridConfig::make(int dim, int depth) {
    if (dim < 1 || dim > kMaxDim) {
        throw DomainError("grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    if (depth < 1 || dim * depth > kMaxCellBits) {
        throw DomainError("grid depth out of range for dimension " + std::to_string(dim) + ": " +
                          std::to_string(depth));
    }
    return GridConfig{dim, depth};
}

double GridConfig::cell_volume() const { return std::ldexp(1.0, -dim * depth); }

// ---------------------------------------------------------------------------

DyadicCube DyadicCube::parent() const {
    if (level == 0) throw DomainError("the root cube has no parent");
    return DyadicCube{level - 1, {index[0] >> 1, index[1] >> 1}};
}

DyadicCube DyadicCube::child(int dim, unsigned which) const {
    DyadicCube c{level + 1, {index[0] << 1, index[1] << 1}};
    c.index[0] |= which & 1u;
    if (dim == 2) c.index[1] |= (which >> 1) & 1u;
    return c;
}

double DyadicCube::side_length() const { return std::ldexp(1.0, -level); }

double DyadicCube::volume(int dim) const { return std::ldexp(1.0, -dim * level); }

std::size_t DyadicCube::flat_index(int dim) const {
    if (dim == 1) return index[0];
    return (static_cast<std::size_t>(index[1]) << level) + index[0];
}

DyadicCube DyadicCube::from_flat(int dim, int level, std::size_t flat) {
    DyadicCube q{level, {0, 0}};
    if (dim == 1) {
        q.index[0] = static_cast<std::uint32_t>(flat);
    } else {
        const std::size_t mask = (std::size_t{1} << level) - 1;
        q.index[0] = static_cast<std::uint32_t>(flat & mask);
        q.index[1] = static_cast<std::uint32_t>(flat >> level);
    }
    return q;
}

bool DyadicCube::contains(const DyadicCube& other) const {
    if (other.level < level) return false;
    const int shift = other.level - level;
    return (other.index[0] >> shift) == index[0] && (other.index[1] >> shift) == index[1];
}

std::vector<std::size_t> DyadicCube::cells(const GridConfig& cfg) const {
    const int shift = cfg.depth - level;
    const std::size_t span = std::size_t{1} << shift;
    const std::size_t x0 = static_cast<std::size_t>(index[0]) << shift;
    std::vector<std::size_t> out;
    out.reserve(cell_count(cfg));
    if (cfg.dim == 1) {
        for (std::size_t i = 0; i < span; ++i) out.push_back(x0 + i);
    } else {
        const std::size_t y0 = static_cast<std::size_t>(index[1]) << shift;
        for (std::size_t y = 0; y < span; ++y)
            for (std::size_t x = 0; x < span; ++x) out.push_back((y0 + y) * cfg.side() + x0 + x);
    }
    return out;
}

std::string DyadicCube::to_string(int dim) const {
    // Interval notation with dyadic endpoints, e.g. [1/2,3/4)
    auto frac = [&](std::uint64_t num) {
        if (num == 0) return std::string("0");
        std::uint64_t den = std::uint64_t{1} << level;
        const int tz = std::min<int>(std::countr_zero(num), level);
        num >>= tz;
        den >>= tz;
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    };
    std::string s;
    for (int d = 0; d < dim; ++d) {
        if (d) s += "x";
        s += "[" + frac(index[d]) + "," + frac(index[d] + 1) + ")";
    }
    return s;
}

void for_each_cube(const GridConfig& cfg, const DyadicCube& top,
                   const std::function<void(const DyadicCube&)>& fn) {
    for (int k = top.level; k <= cfg.depth; ++k) {
        const int shift = k - top.level;
        const std::uint32_t span = 1u << shift;
        const std::uint32_t y_span = cfg.dim == 2 ? span : 1u;
        for (std::uint32_t y = 0; y < y_span; ++y) {
            for (std::uint32_t x = 0; x < span; ++x) {
                DyadicCube q{k, {(top.index[0] << shift) + x, cfg.dim == 2 ? (top.index[1] << shift) + y : 0u}};
                fn(q);
            }
        }
    }
}

DyadicCube cube_of_cell(const GridConfig& cfg, std::size_t cell, int level) {
    const int shift = cfg.depth - level;
    DyadicCube q{level, {0, 0}};
    if (cfg.dim == 1) {
        q.index[0] = static_cast<std::uint32_t>(cell >> shift);
    } else {
        q.index[0] = static_cast<std::uint32_t>((cell % cfg.side()) >> shift);
        q.index[1] = static_cast<std::uint32_t>((cell / cfg.side()) >> shift);
    }
    return q;
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::explicit_values: return "explicit";
        case Provenance::exact_integral: return "exact-integral";
        case Provenance::midpoint_sample: return "midpoint-sample";
    }
    return "?";
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(GridConfig cfg, std::vector<double> values, Interpretation interp,
                           Provenance prov)
    : cfg_(cfg), values_(std::move(values)), interp_(interp), prov_(prov) {
    if (values_.size() != cfg_.cells()) {
        throw DomainError("expected " + std::to_string(cfg_.cells()) + " cell values, got " +
                          std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("grid function values must be finite");
        if (interp_ == Interpretation::weight && !(v > 0.0)) {
            throw DomainError("weights must be strictly positive on every cell");
        }
    }
}

GridFunction GridFunction::as_weight() const {
    return GridFunction(cfg_, values_, Interpretation::weight, prov_);
}

GridFunction GridFunction::map(const std::function<double(double)>& fn) const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), fn);
    return GridFunction(cfg_, std::move(out), Interpretation::generic, prov_);
}

// ---------------------------------------------------------------------------

DyadicSums::DyadicSums(const GridConfig& cfg, std::span<const double> cell_values) : cfg_(cfg) {
    levels_.resize(cfg.depth + 1);
    levels_[cfg.depth].assign(cell_values.begin(), cell_values.end());
    for (int k = cfg.depth - 1; k >= 0; --k) {
        const std::size_t side = std::size_t{1} << k;
        const auto& fine = levels_[k + 1];
        auto& coarse = levels_[k];
        if (cfg.dim == 1) {
            coarse.resize(side);
            for (std::size_t i = 0; i < side; ++i) coarse[i] = fine[2 * i] + fine[2 * i + 1];
        } else {
            coarse.resize(side * side);
            const std::size_t fs = 2 * side;
            for (std::size_t y = 0; y < side; ++y) {
                for (std::size_t x = 0; x < side; ++x) {
                    const std::size_t b = 2 * y * fs + 2 * x;
                    coarse[y * side + x] = (fine[b] + fine[b + 1]) + (fine[b + fs] + fine[b + fs + 1]);
                }
            }
        }
    }
}

double DyadicSums::average(const DyadicCube& q) const {
    return std::ldexp(cell_sum(q), -cfg_.dim * (cfg_.depth - q.level));
}

double average(const GridFunction& f, const DyadicCube& q) {
    // Summed through a local tree so the result agrees with DyadicSums bit for bit.
    const GridConfig& cfg = f.config();
    std::vector<double> local;
    local.reserve(q.cell_count(cfg));
    for (std::size_t c : q.cells(cfg)) local.push_back(f[c]);
    if (q.level == cfg.depth) return local.front();
    const DyadicSums sums(GridConfig{cfg.dim, cfg.depth - q.level}, local);
    return sums.average(DyadicCube::root());
}

// ---------------------------------------------------------------------------
// Function construction

namespace {

const std::map<std::string, FunctionKind>& kind_names() {
    static const std::map<std::string, FunctionKind> names{
        {"explicit", FunctionKind::explicit_values}, {"step", FunctionKind::step},
        {"poly_exact", FunctionKind::formula_exact}, {"poly_midpoint", FunctionKind::formula_midpoint},
        {"martingale", FunctionKind::martingale},    {"power", FunctionKind::power}};
    return names;
}

std::string kind_name(FunctionKind k) {
    for (const auto& [name, kind] : kind_names())
        if (kind == k) return name;
    return "?";
}

// Graded-lex exponent list shared with the polynomial module.
std::vector<std::array<int, kMaxDim>> graded_exponents(int dim, std::size_t count) {
    std::vector<std::array<int, kMaxDim>> out;
    for (int d = 0; out.size() < count; ++d) {
        if (dim == 1) {
            out.push_back({d, 0});
        } else {
            for (int a = d; a >= 0 && out.size() < count; --a) out.push_back({a, d - a});
        }
    }
    return out;
}

// Mean of x^a over [lo, hi].
double monomial_mean(int a, double lo, double hi) {
    return (std::pow(hi, a + 1) - std::pow(lo, a + 1)) / ((a + 1) * (hi - lo));
}

// Mean of |x - c|^alpha over [lo, hi].
double power_mean(double alpha, double c, double lo, double hi) {
    auto anti = [&](double x) {
        const double u = x - c;
        const double m = std::pow(std::abs(u), alpha + 1.0) / (alpha + 1.0);
        return u < 0 ? -m : m;
    };
    return (anti(hi) - anti(lo)) / (hi - lo);
}

double poly_value(const std::vector<double>& coeffs, const std::vector<std::array<int, kMaxDim>>& ex,
                  int dim, double x, double y) {
    double v = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        double term = coeffs[i] * std::pow(x, ex[i][0]);
        if (dim == 2) term *= std::pow(y, ex[i][1]);
        v += term;
    }
    return v;
}

}  // namespace

std::string FunctionSpec::to_entry() const {
    std::ostringstream os;
    os << kind_name(kind);
    switch (kind) {
        case FunctionKind::explicit_values:
        case FunctionKind::step: os << " values=" << join_doubles(values); break;
        case FunctionKind::formula_exact:
        case FunctionKind::formula_midpoint: os << " coeffs=" << join_doubles(coefficients); break;
        case FunctionKind::martingale:
            os << " seed=" << seed << " amplitude=" << format_double(amplitude);
            break;
        case FunctionKind::power:
            os << " alpha=" << format_double(alpha) << " center=" << join_doubles({center[0], center[1]});
            break;
    }
    if (weight) os << " weight=1";
    return os.str();
}

FunctionSpec FunctionSpec::parse_entry(const std::string& line) {
    const Entry e = parse_key_values(line);
    const auto it = kind_names().find(e.kind);
    if (it == kind_names().end()) throw DomainError("unknown function kind '" + e.kind + "'");
    FunctionSpec s;
    s.kind = it->second;
    bool have_seed = false;
    for (const auto& [key, value] : e.params) {
        if (key == "weight") {
            s.weight = parse_bool(value);
        } else if (key == "values" && (s.kind == FunctionKind::explicit_values || s.kind == FunctionKind::step)) {
            s.values = parse_doubles(value);
        } else if (key == "coeffs" &&
                   (s.kind == FunctionKind::formula_exact || s.kind == FunctionKind::formula_midpoint)) {
            s.coefficients = parse_doubles(value);
        } else if (key == "seed" && s.kind == FunctionKind::martingale) {
            s.seed = parse_uint(value);
            have_seed = true;
        } else if (key == "amplitude" && s.kind == FunctionKind::martingale) {
            s.amplitude = parse_double(value);
        } else if (key == "alpha" && s.kind == FunctionKind::power) {
            s.alpha = parse_double(value);
        } else if (key == "center" && s.kind == FunctionKind::power) {
            const auto c = parse_doubles(value);
            if (c.empty() || c.size() > 2) throw DomainError("center needs one or two coordinates");
            s.center = {c[0], c.size() > 1 ? c[1] : 0.0};
        } else {
            throw DomainError("unknown key '" + key + "' for function kind '" + e.kind + "'");
        }
    }
    if (s.kind == FunctionKind::martingale && !have_seed) {
        throw DomainError("martingale specs require an explicit seed");
    }
    return s;
}

GridFunction build_function(const GridConfig& cfg, const FunctionSpec& spec) {
    const std::size_t side = cfg.side();
    const double h = 1.0 / static_cast<double>(side);
    std::vector<double> v(cfg.cells());
    Provenance prov = Provenance::explicit_values;

    auto for_cells = [&](auto&& fn) {
        for (std::size_t c = 0; c < v.size(); ++c) {
            const std::size_t ix = c % side;
            const std::size_t iy = cfg.dim == 2 ? c / side : 0;
            v[c] = fn(ix, iy);
        }
    };

    switch (spec.kind) {
        case FunctionKind::explicit_values:
            if (spec.values.size() != v.size()) {
                throw DomainError("explicit function needs " + std::to_string(v.size()) + " values");
            }
            v = spec.values;
            break;
        case FunctionKind::step: {
            int level = -1;
            for (int k = 0; k <= cfg.depth; ++k)
                if ((std::size_t{1} << (cfg.dim * k)) == spec.values.size()) level = k;
            if (level < 0) throw DomainError("step pattern length must be 2^(n k) with k <= J");
            for (std::size_t c = 0; c < v.size(); ++c)
                v[c] = spec.values[cube_of_cell(cfg, c, level).flat_index(cfg.dim)];
            break;
        }
        case FunctionKind::formula_exact:
        case FunctionKind::formula_midpoint: {
            if (spec.coefficients.empty()) throw DomainError("polynomial formula needs coefficients");
            const auto ex = graded_exponents(cfg.dim, spec.coefficients.size());
            const bool exact = spec.kind == FunctionKind::formula_exact;
            prov = exact ? Provenance::exact_integral : Provenance::midpoint_sample;
            for_cells([&](std::size_t ix, std::size_t iy) {
                const double x0 = ix * h, y0 = iy * h;
                if (!exact) return poly_value(spec.coefficients, ex, cfg.dim, x0 + h / 2, y0 + h / 2);
                double s = 0.0;
                for (std::size_t i = 0; i < ex.size(); ++i) {
                    double term = spec.coefficients[i] * monomial_mean(ex[i][0], x0, x0 + h);
                    if (cfg.dim == 2) term *= monomial_mean(ex[i][1], y0, y0 + h);
                    s += term;
                }
                return s;
            });
            break;
        }
        case FunctionKind::power: {
            if (!(spec.alpha > -1.0)) {
                throw DomainError("power weight exponent must exceed -1 (local integrability)");
            }
            prov = Provenance::exact_integral;
            // n = 2 uses the tensor product |x - a|^alpha |y - b|^alpha, whose cell
            // means factor into one-dimensional closed forms.
            for_cells([&](std::size_t ix, std::size_t iy) {
                double m = power_mean(spec.alpha, spec.center[0], ix * h, (ix + 1) * h);
                if (cfg.dim == 2) m *= power_mean(spec.alpha, spec.center[1], iy * h, (iy + 1) * h);
                return m;
            });
            break;
        }
        case FunctionKind::martingale: {
            // Top-down: each cube hands its value to its children plus zero-sum
            // random increments drawn from {1/2, 1, 3/2, 2} * amplitude.
            std::mt19937_64 rng(spec.seed);
            std::vector<double> level_vals{0.0};
            for (int k = 0; k < cfg.depth; ++k) {
                std::vector<double> next(std::size_t{1} << (cfg.dim * (k + 1)));
                for (std::size_t idx = 0; idx < level_vals.size(); ++idx) {
                    const std::uint64_t bits = rng();
                    const double mag = spec.amplitude * 0.5 * static_cast<double>(1 + (bits & 3u));
                    const DyadicCube q = DyadicCube::from_flat(cfg.dim, k, idx);
                    if (cfg.dim == 1) {
                        const double sign = (bits & 4u) ? 1.0 : -1.0;
                        next[2 * idx] = level_vals[idx] + sign * mag;
                        next[2 * idx + 1] = level_vals[idx] - sign * mag;
                    } else {
                        // One of the six balanced sign patterns on four children.
                        static constexpr int patterns[6][4] = {{1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1},
                                                               {-1, 1, 1, -1}, {-1, 1, -1, 1}, {-1, -1, 1, 1}};
                        const int* pat = patterns[(bits >> 2) % 6];
                        for (unsigned c = 0; c < 4; ++c) {
                            const DyadicCube ch = q.child(2, c);
                            next[ch.flat_index(2)] = level_vals[idx] + pat[c] * mag;
                        }
                    }
                }
                level_vals = std::move(next);
            }
            v = std::move(level_vals);
            break;
        }
    }
    return GridFunction(cfg, std::move(v), spec.weight ? Interpretation::weight : Interpretation::generic, prov);
}

GridFunction truncate(const GridFunction& f, double height) {
    if (!(height > 0)) throw DomainError("truncation height must be positive");
    return f.map([height](double x) { return std::clamp(x, -height, height); });
}

// ---------------------------------------------------------------------------
// Shifted lattices

int shift_denominator(int dim) {
    int p = dim + 1;
    if (p % 2 == 0) ++p;
    return p;
}

ShiftedLatticeSystem shifted_systems(const GridConfig& cfg) {
    ShiftedLatticeSystem sys;
    sys.base = cfg;
    sys.denominator = shift_denominator(cfg.dim);
    const double refined_cells =
        std::pow(static_cast<double>(sys.denominator) * static_cast<double>(cfg.side()), cfg.dim);
    if (refined_cells > std::ldexp(1.0, kMaxCellBits + 4)) {
        throw DomainError("grid too deep for shifted-lattice refinement");
    }
    for (int j = 0; j <= cfg.dim; ++j) sys.shifts.push_back(static_cast<double>(j) / sys.denominator);
    return sys;
}

namespace {

long floor_div(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

double covering_length_ratio(const ShiftedLatticeSystem& sys) {
    const GridConfig& cfg = sys.base;
    const long p = sys.denominator;
    const long side = static_cast<long>(cfg.side());
    double worst = 1.0;
    for (int k = 0; k <= cfg.depth; ++k) {
        const long s = side >> k;  // base cells per side
        const long positions = side - s + 1;
        const long ny = cfg.dim == 2 ? positions : 1;
        for (long ay = 0; ay < ny; ++ay) {
            for (long ax = 0; ax < positions; ++ax) {
                const std::array<long, 2> a{ax, ay};
                long best = std::numeric_limits<long>::max();
                for (std::size_t j = 0; j < sys.systems(); ++j) {
                    const long off = sys.offset(j);
                    for (int lvl = k; lvl >= 0; --lvl) {
                        const long len = p * (side >> lvl);
                        if (len >= best) break;
                        bool ok = true;
                        for (int d = 0; d < cfg.dim && ok; ++d) {
                            const long lo = p * a[d] - off;
                            const long hi = lo + p * s - 1;
                            ok = floor_div(lo, len) == floor_div(hi, len);
                        }
                        if (ok) {
                            best = len;
                            break;
                        }
                    }
                }
                worst = std::max(worst, static_cast<double>(best) / static_cast<double>(p * s));
            }
        }
    }
    return worst;
}

double LatticeField::cell_volume() const {
    return std::pow(1.0 / static_cast<double>(side), dim);
}

LatticeField refine(const GridFunction& f, int factor) {
    const GridConfig& cfg = f.config();
    LatticeField out;
    out.dim = cfg.dim;
    out.side = cfg.side() * static_cast<std::size_t>(factor);
    out.values.resize(cfg.dim == 1 ? out.side : out.side * out.side);
    const std::size_t fac = static_cast<std::size_t>(factor);
    for (std::size_t c = 0; c < out.values.size(); ++c) {
        const std::size_t ix = (c % out.side) / fac;
        const std::size_t iy = cfg.dim == 2 ? (c / out.side) / fac : 0;
        out.values[c] = f[iy * cfg.side() + ix];
    }
    return out;
}

GridFunction coarsen_min(const LatticeField& field, const GridConfig& cfg, int factor) {
    std::vector<double> v(cfg.cells(), std::numeric_limits<double>::infinity());
    const std::size_t fac = static_cast<std::size_t>(factor);
    for (std::size_t c = 0; c < field.values.size(); ++c) {
        const std::size_t ix = (c % field.side) / fac;
        const std::size_t iy = cfg.dim == 2 ? (c / field.side) / fac : 0;
        double& slot = v[iy * cfg.side() + ix];
        slot = std::min(slot, field.values[c]);
    }
    return GridFunction(cfg, std::move(v));
}

// ---------------------------------------------------------------------------
// Export

std::string to_csv(const GridFunction& f) {
    std::ostringstream os;
    os << "cell,value\n";
    for (std::size_t c = 0; c < f.size(); ++c) os << c << "," << format_double(f[c]) << "\n";
    return os.str();
}

namespace {
constexpr char kMagic[4] = {'J', 'N', 'K', 'F'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
    return v;
}
}  // namespace

std::vector<std::uint8_t> to_binary(const GridFunction& f) {
    static_assert(std::endian::native == std::endian::little, "binary dump assumes little-endian doubles");
    std::vector<std::uint8_t> out(kMagic, kMagic + 4);
    put_u32(out, static_cast<std::uint32_t>(f.config().dim));
    put_u32(out, static_cast<std::uint32_t>(f.config().depth));
    put_u32(out, static_cast<std::uint32_t>(f.is_weight()) | (static_cast<std::uint32_t>(f.provenance()) << 8));
    const std::size_t at = out.size();
    out.resize(at + f.size() * sizeof(double));
    std::memcpy(out.data() + at, f.values().data(), f.size() * sizeof(double));
    return out;
}

GridFunction from_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw DomainError("not a grid function dump");
    }
    const GridConfig cfg = GridConfig::make(static_cast<int>(get_u32(bytes, 4)), static_cast<int>(get_u32(bytes, 8)));
    const std::uint32_t flags = get_u32(bytes, 12);
    if (bytes.size() != 16 + cfg.cells() * sizeof(double)) throw DomainError("grid function dump has wrong size");
    std::vector<double> v(cfg.cells());
    std::memcpy(v.data(), bytes.data() + 16, v.size() * sizeof(double));
    return GridFunction(cfg, std::move(v), (flags & 1u) ? Interpretation::weight : Interpretation::generic,
                        static_cast<Provenance>((flags >> 8) & 0xffu));
}

}  // namespace jnkit
