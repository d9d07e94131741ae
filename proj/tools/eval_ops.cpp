#include "eval_ops.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "jnkit/functionals.hpp"
#include "jnkit/grid.hpp"
#include "jnkit/harness.hpp"
#include "jnkit/maximal.hpp"
#include "jnkit/polybmo.hpp"
#include "jnkit/text.hpp"
#include "jnkit/verify.hpp"
#include "jnkit/weights.hpp"

namespace jnkit::cli {

namespace {

using Args = std::map<std::string, std::string>;

const std::set<std::string> kFunctionKeys = {"f", "h", "w", "mu"};

Json num(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

Json nums(std::span<const double> v) {
    Json out = Json::array();
    for (double x : v) out.push_back(num(x));
    return out;
}

Json cube_json(const DyadicCube& q, int dim) {
    Json idx = Json::array();
    for (int i = 0; i < dim; ++i) idx.push_back(q.index[i]);
    return Json{{"level", q.level}, {"index", idx}};
}

Json lattice_json(const LatticeField& f) {
    return Json{{"side", f.side}, {"values", nums(f.values)}};
}

Json constant_json(const WeightConstant& c, int dim) {
    Json j{{"value", num(c.value)}, {"witness", cube_json(c.witness, dim)}};
    if (!c.witness_label.empty()) j["witness_label"] = c.witness_label;
    if (c.overflow) j["overflow"] = true;
    return j;
}

bool is_entry(const std::string& v) { return !v.empty() && std::isalpha(static_cast<unsigned char>(v.front())); }

int log2_exact(std::size_t m) {
    if (m == 0 || (m & (m - 1)) != 0) throw ConfigError("value count " + std::to_string(m) + " is not a power of two");
    int k = 0;
    while ((std::size_t{1} << k) < m) ++k;
    return k;
}

class Context {
public:
    explicit Context(const Args& args) : args_(args) {}

    bool has(const std::string& key) const { return args_.count(key) > 0; }

    const std::string& raw(const std::string& key) const {
        const auto it = args_.find(key);
        if (it == args_.end()) throw ConfigError("missing argument " + key + "=");
        return it->second;
    }

    double number(const std::string& key) const { return parse_double(raw(key)); }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
    int integer(const std::string& key, int fallback) const {
        return has(key) ? static_cast<int>(parse_uint(raw(key))) : fallback;
    }

    int dim() const { return integer("n", 1); }

    GridConfig grid() const {
        const int n = dim();
        if (has("J")) return GridConfig::make(n, integer("J", 1));
        int depth = -1;
        for (const auto& key : kFunctionKeys) {
            if (!has(key) || is_entry(raw(key))) continue;
            const int bits = log2_exact(parse_doubles(raw(key)).size());
            if (bits % n != 0) throw ConfigError(key + "= has " + std::to_string(bits) + " bits, not a multiple of n");
            depth = std::max(depth, bits / n);
        }
        if (depth < 0) throw ConfigError("give J= or a cell-value list");
        return GridConfig::make(n, depth);
    }

    GridFunction function(const std::string& key, bool weight = false) const {
        const GridConfig g = grid();
        const std::string& v = raw(key);
        FunctionSpec spec;
        if (is_entry(v)) {
            spec = FunctionSpec::parse_entry(v);
        } else {
            spec.values = parse_doubles(v);
            if (spec.values.size() == g.cells()) {
                spec.kind = FunctionKind::explicit_values;
            } else {
                spec.kind = FunctionKind::step;
            }
        }
        spec.weight = spec.weight || weight;
        return build_function(g, spec);
    }

    DyadicCube cube() const {
        if (!has("cube")) return DyadicCube::root();
        const auto parts = split(raw("cube"), ':');
        if (parts.size() != 2) throw ConfigError("cube= expects level:i[,j]");
        DyadicCube q;
        q.level = static_cast<int>(parse_uint(parts[0]));
        const auto idx = parse_ints(parts[1]);
        if (static_cast<int>(idx.size()) != dim()) throw ConfigError("cube index needs n coordinates");
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] < 0) throw ConfigError("cube index must be non-negative");
            q.index[i] = static_cast<std::uint32_t>(idx[i]);
        }
        const int J = grid().depth;
        if (q.level > J) throw ConfigError("cube level exceeds J");
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (q.index[i] >= (1u << q.level)) throw ConfigError("cube index out of range");
        return q;
    }

    Scope scope() const { return has("scope") ? parse_scope(raw("scope")) : Scope::dyadic; }

    const GridFunction* optional_weight(const std::string& key, GridFunction& storage) const {
        if (!has(key)) return nullptr;
        storage = function(key, true);
        return &storage;
    }

private:
    const Args& args_;
};

Json field_json(const GridFunction& f) { return nums(f.values()); }

// --- grid ------------------------------------------------------------------

Json op_build_function(const Args& a) {
    Context c(a);
    return field_json(c.function("f"));
}

Json op_average(const Args& a) {
    Context c(a);
    return num(average(c.function("f"), c.cube()));
}

Json op_truncate(const Args& a) {
    Context c(a);
    return field_json(truncate(c.function("f"), c.number("height")));
}

Json op_shifted_systems(const Args& a) {
    Context c(a);
    const ShiftedLatticeSystem s = shifted_systems(GridConfig::make(c.dim(), c.integer("J", 1)));
    return Json{{"denominator", s.denominator}, {"shifts", nums(s.shifts)}, {"refined_side", s.refined_side()}};
}

Json op_shift_denominator(const Args& a) { return shift_denominator(Context(a).dim()); }

Json op_covering_length_ratio(const Args& a) {
    Context c(a);
    return num(covering_length_ratio(shifted_systems(GridConfig::make(c.dim(), c.integer("J", 1)))));
}

Json op_refine(const Args& a) {
    Context c(a);
    return lattice_json(refine(c.function("f"), c.integer("factor", 3)));
}

Json op_coarsen_min(const Args& a) {
    Context c(a);
    const GridFunction f = c.function("f");
    const int factor = c.integer("factor", 3);
    return field_json(coarsen_min(refine(f, factor), f.config(), factor));
}

// --- maximal ---------------------------------------------------------------

Json op_local_dyadic_maximal(const Args& a) {
    Context c(a);
    return field_json(local_dyadic_maximal(c.function("h"), c.cube()));
}

Json op_sharp_maximal(const Args& a) {
    Context c(a);
    return field_json(sharp_maximal(c.function("f"), c.cube(), c.integer("k", 0), c.scope()));
}

Json op_shifted_sharp_field(const Args& a) {
    Context c(a);
    return lattice_json(shifted_sharp_field(c.function("f"), c.cube(), c.integer("k", 0)));
}

Json op_shifted_maximal_field(const Args& a) {
    Context c(a);
    return lattice_json(shifted_maximal_field(c.function("h")));
}

Json op_system_maximal_fields(const Args& a) {
    Context c(a);
    Json out = Json::array();
    for (const auto& f : system_maximal_fields(c.function("h"))) out.push_back(lattice_json(f));
    return out;
}

Json op_brute_force_sharp(const Args& a) {
    Context c(a);
    return lattice_json(brute_force_sharp(c.function("f"), c.cube(), c.integer("k", 0)));
}

Json op_brute_force_maximal(const Args& a) {
    Context c(a);
    return lattice_json(brute_force_maximal(c.function("h")));
}

Json op_lattice_covering_ratio(const Args& a) {
    Context c(a);
    return num(lattice_covering_ratio(shifted_systems(GridConfig::make(c.dim(), c.integer("J", 1)))));
}

Json op_cz_decompose(const Args& a) {
    Context c(a);
    const GridFunction h = c.function("h");
    return Json::parse(to_json(cz_decompose(h, c.cube(), c.number("lambda")), h.config().dim));
}

Json op_cz_decompose_bump(const Args& a) {
    Context c(a);
    const GridFunction f = c.function("f");
    const GridFunction w = c.function("w", true);
    return Json::parse(to_json(cz_decompose_bump(f, c.cube(), w, c.number("r", 2), c.number("L")), f.config().dim));
}

Json op_bump_sum_holder(const Args& a) {
    Context c(a);
    const GridFunction f = c.function("f");
    const GridFunction w = c.function("w", true);
    const double r = c.number("r", 2);
    const auto [lhs, rhs] = bump_sum_holder(cz_decompose_bump(f, c.cube(), w, r, c.number("L")), w, r);
    return Json{{"lhs", num(lhs)}, {"rhs", num(rhs)}};
}

Json op_ratio_field(const Args& a) {
    Context c(a);
    const RatioField F = ratio_field(c.function("f"), c.cube(), c.integer("k", 0), c.scope());
    return Json{{"values", field_json(F.values)},
                {"numerator", field_json(F.numerator)},
                {"denominator", field_json(F.denominator)}};
}

Json op_measure(const Args& a) {
    Context c(a);
    GridFunction mu;
    const GridFunction* density = c.optional_weight("mu", mu);
    return num(measure(c.cube(), c.grid(), density));
}

Json op_superlevel_measure(const Args& a) {
    Context c(a);
    GridFunction mu;
    const GridFunction* density = c.optional_weight("mu", mu);
    return num(superlevel_measure(c.function("f"), c.cube(), c.number("t"), density));
}

Json op_lp_norm(const Args& a) {
    Context c(a);
    GridFunction mu;
    const GridFunction* density = c.optional_weight("mu", mu);
    return num(lp_norm(c.function("f"), c.cube(), density, c.number("p"), c.integer("normalized", 1) != 0));
}

Json op_weak_lorentz_norm(const Args& a) {
    Context c(a);
    GridFunction mu;
    const GridFunction* density = c.optional_weight("mu", mu);
    return num(weak_lorentz_norm(c.function("f"), c.cube(), density, c.number("r"), c.integer("normalized", 1) != 0));
}

Json op_survival_function(const Args& a) {
    Context c(a);
    GridFunction mu;
    const GridFunction* density = c.optional_weight("mu", mu);
    Json out = Json::array();
    for (const auto& s : survival_function(c.function("f"), c.cube(), density))
        out.push_back(Json{{"t", num(s.t)}, {"mass", num(s.mass)}});
    return out;
}

// --- weights ---------------------------------------------------------------

Json op_bump(const Args& a) {
    Context c(a);
    return num(bump(c.function("w", true), c.cube(), c.number("r")));
}

Json op_ap_constant(const Args& a) {
    Context c(a);
    const WeightConstant k = ap_constant(c.function("w", true), c.number("p"));
    return a.count("witness") ? constant_json(k, c.dim()) : num(k.value);
}

Json op_ainfty_constant(const Args& a) {
    Context c(a);
    const WeightConstant k = ainfty_constant(c.function("w", true), c.scope());
    return a.count("witness") ? constant_json(k, c.dim()) : num(k.value);
}

Json op_ap_bump_constant(const Args& a) {
    Context c(a);
    const WeightConstant k = ap_bump_constant(c.function("w", true), c.number("p"), c.number("r"));
    return a.count("witness") ? constant_json(k, c.dim()) : num(k.value);
}

Json op_cp_constant(const Args& a) {
    Context c(a);
    const WeightConstant k = cp_constant(c.function("w", true), c.number("p"));
    return a.count("witness") ? constant_json(k, c.dim()) : num(k.value);
}

Json op_cp_denominator(const Args& a) {
    Context c(a);
    const GridFunction w = c.function("w", true);
    const DyadicSums sums(w.config(), w.values());
    return num(cp_denominator(w, c.cube(), c.number("p"), sums));
}

RhiMode rhi_mode(const Context& c) {
    const std::string m = c.has("mode") ? c.raw("mode") : "ainfty";
    if (m == "ainfty") return RhiMode::ainfty;
    if (m == "cp") return RhiMode::cp;
    throw ConfigError("mode= must be ainfty or cp");
}

Json op_rhi_delta(const Args& a) {
    Context c(a);
    const RhiMode mode = rhi_mode(c);
    const double fallback = mode == RhiMode::ainfty ? kRhiCalibrationAinfty : kRhiCalibrationCp;
    return num(rhi_delta(mode, c.number("constant"), c.number("calibration", fallback)));
}

Json op_reverse_holder_check(const Args& a) {
    Context c(a);
    const ReverseHolderReport r =
        reverse_holder_check(c.function("w", true), c.number("delta"), rhi_mode(c), c.number("p", 2));
    return Json{{"delta", num(r.delta)},
                {"max_ratio", num(r.max_ratio)},
                {"witness", cube_json(r.witness, c.dim())},
                {"pass", r.pass}};
}

Json op_weight_report(const Args& a) {
    Context c(a);
    const auto ps = a.count("p") ? parse_doubles(a.at("p")) : std::vector<double>{2};
    return Json::parse(to_json(weight_report(c.function("w", true), ps, c.number("r", 2)), c.dim()));
}

// --- polybmo ---------------------------------------------------------------

Json basis_json(const PolynomialBasis& b) {
    Json exps = Json::array();
    for (const auto& e : b.exponents) {
        Json one = Json::array();
        for (int i = 0; i < b.dim; ++i) one.push_back(e[i]);
        exps.push_back(one);
    }
    Json coeffs = Json::array();
    for (const auto& row : b.coefficients) coeffs.push_back(nums(row));
    return Json{{"degree", b.degree},
                {"n", b.dim},
                {"exponents", exps},
                {"coefficients", coeffs},
                {"sup_norms", nums(b.sup_norms)},
                {"gamma", num(b.gamma)}};
}

Json op_orthonormal_basis(const Args& a) {
    Context c(a);
    return basis_json(orthonormal_basis(c.integer("k", 0), c.dim()));
}

Json op_gamma_constant(const Args& a) {
    Context c(a);
    return num(gamma_constant(orthonormal_basis(c.integer("k", 0), c.dim())));
}

Json op_project(const Args& a) {
    Context c(a);
    const Projection p = project(c.function("f"), c.cube(), cached_basis(c.integer("k", 0), c.dim()));
    return Json{{"coefficients", nums(p.coefficients)}, {"cell_values", nums(p.cell_values)}};
}

Json op_projection_bound_ratio(const Args& a) {
    Context c(a);
    return num(projection_bound_ratio(c.function("f"), c.cube(), cached_basis(c.integer("k", 0), c.dim())));
}

Json op_osc_k(const Args& a) {
    Context c(a);
    return num(osc_k(c.function("f"), c.cube(), cached_basis(c.integer("k", 0), c.dim())));
}

Json op_bmo_norm(const Args& a) {
    Context c(a);
    const GridFunction f = c.function("f");
    GridFunction w;
    std::optional<WeightedBy> by;
    if (c.has("w")) {
        w = c.function("w", true);
        by = WeightedBy{&w, c.number("r", 1)};
    }
    const NormWithWitness n = bmo_norm(f, cached_basis(c.integer("k", 0), c.dim()), by);
    return Json{{"value", num(n.value)}, {"witness", cube_json(n.witness, c.dim())}};
}

Json op_optimality_check(const Args& a) {
    Context c(a);
    const OptimalityReport r = optimality_check(c.function("f"), c.cube(), cached_basis(c.integer("k", 0), c.dim()));
    return Json{{"osc", num(r.osc)},
                {"best", num(r.best)},
                {"ratio", num(r.ratio)},
                {"bound", num(r.bound)},
                {"pass", r.pass}};
}

// --- functionals -----------------------------------------------------------

Functional functional_arg(const Context& c) {
    const std::string kind = c.has("a") ? c.raw("a") : "measure_quotient";
    if (kind == "oscillation") return Functional::oscillation(c.function("f"));
    if (kind == "measure_quotient") {
        GridFunction mu, w;
        const GridFunction* mup = c.optional_weight("mu", mu);
        const GridFunction* wp = c.optional_weight("w", w);
        return Functional::measure_quotient(c.grid(), mup, wp, c.number("r", 2), c.number("scale", 1));
    }
    throw ConfigError("a= must be measure_quotient or oscillation");
}

Json op_dr_norm_estimate(const Args& a) {
    Context c(a);
    GridFunction w;
    const GridFunction* wp = c.optional_weight("w", w);
    const DrNorm d = dr_norm_estimate(functional_arg(c), wp, c.number("r", 2), c.cube());
    return Json{{"value", num(d.value)}, {"witness", cube_json(d.witness, c.dim())}, {"infinite", d.infinite}};
}

Json op_poincare_hypothesis_ratio(const Args& a) {
    Context c(a);
    return num(poincare_hypothesis_ratio(c.function("f"), functional_arg(c), c.cube()));
}

Json op_verify_poincare(const Args& a) {
    Context c(a);
    const GridFunction w = c.has("w") ? c.function("w", true)
                                      : GridFunction(c.grid(), std::vector<double>(c.grid().cells(), 1.0),
                                                     Interpretation::weight);
    return Json::parse(to_json_line(verify_poincare(c.function("f"), functional_arg(c), w, c.number("r", 2), c.cube())));
}

Json op_gradient_density(const Args& a) { return field_json(gradient_density(Context(a).function("f"))); }

// --- verify ----------------------------------------------------------------

Json op_minimize_power_ratio(const Args& a) {
    Context c(a);
    const PowerRatioMinimum m = minimize_power_ratio(c.number("alpha"));
    return Json{{"t_star", num(m.t_star)}, {"min", num(m.min)}, {"bound", num(m.bound)}, {"pass", m.pass}};
}

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::set<std::string> grid = {"n", "J"};
    auto with = [](std::set<std::string> extra) {
        extra.insert(grid.begin(), grid.end());
        return extra;
    };
    static const std::map<std::string, std::set<std::string>> keys = {
        {"build_function", with({"f"})},
        {"average", with({"f", "cube"})},
        {"truncate", with({"f", "height"})},
        {"shifted_systems", with({})},
        {"shift_denominator", with({})},
        {"covering_length_ratio", with({})},
        {"refine", with({"f", "factor"})},
        {"coarsen_min", with({"f", "factor"})},
        {"local_dyadic_maximal", with({"h", "cube"})},
        {"sharp_maximal", with({"f", "cube", "k", "scope"})},
        {"shifted_sharp_field", with({"f", "cube", "k"})},
        {"shifted_maximal_field", with({"h"})},
        {"system_maximal_fields", with({"h"})},
        {"brute_force_sharp", with({"f", "cube", "k"})},
        {"brute_force_maximal", with({"h"})},
        {"lattice_covering_ratio", with({})},
        {"cz_decompose", with({"h", "cube", "lambda"})},
        {"cz_decompose_bump", with({"f", "w", "cube", "r", "L"})},
        {"bump_sum_holder", with({"f", "w", "cube", "r", "L"})},
        {"ratio_field", with({"f", "cube", "k", "scope"})},
        {"measure", with({"mu", "cube"})},
        {"superlevel_measure", with({"f", "mu", "cube", "t"})},
        {"lp_norm", with({"f", "mu", "cube", "p", "normalized"})},
        {"weak_lorentz_norm", with({"f", "mu", "cube", "r", "normalized"})},
        {"survival_function", with({"f", "mu", "cube"})},
        {"bump", with({"w", "cube", "r"})},
        {"ap_constant", with({"w", "p", "witness"})},
        {"ainfty_constant", with({"w", "scope", "witness"})},
        {"ap_bump_constant", with({"w", "p", "r", "witness"})},
        {"cp_constant", with({"w", "p", "witness"})},
        {"cp_denominator", with({"w", "cube", "p"})},
        {"rhi_delta", with({"mode", "constant", "calibration"})},
        {"reverse_holder_check", with({"w", "delta", "mode", "p"})},
        {"weight_report", with({"w", "p", "r"})},
        {"orthonormal_basis", with({"k"})},
        {"gamma_constant", with({"k"})},
        {"project", with({"f", "cube", "k"})},
        {"projection_bound_ratio", with({"f", "cube", "k"})},
        {"osc_k", with({"f", "cube", "k"})},
        {"bmo_norm", with({"f", "w", "r", "k"})},
        {"optimality_check", with({"f", "cube", "k"})},
        {"dr_norm_estimate", with({"a", "f", "mu", "w", "r", "scale", "cube"})},
        {"poincare_hypothesis_ratio", with({"a", "f", "mu", "w", "r", "scale", "cube"})},
        {"verify_poincare", with({"a", "f", "mu", "w", "r", "scale", "cube"})},
        {"gradient_density", with({"f"})},
        {"minimize_power_ratio", {"alpha"}},
    };
    return keys;
}

}  // namespace

const std::map<std::string, EvalOp>& eval_ops() {
    static const std::map<std::string, EvalOp> ops = {
        {"build_function", {"cell values of f", op_build_function}},
        {"average", {"avg of f over cube", op_average}},
        {"truncate", {"f clamped to [-height, height]", op_truncate}},
        {"shifted_systems", {"shifted lattice systems for n, J", op_shifted_systems}},
        {"shift_denominator", {"lattice refinement factor for n", op_shift_denominator}},
        {"covering_length_ratio", {"covering side-length ratio", op_covering_length_ratio}},
        {"refine", {"f on the refined lattice", op_refine}},
        {"coarsen_min", {"refine then coarsen by minimum", op_coarsen_min}},
        {"local_dyadic_maximal", {"M_Q h", op_local_dyadic_maximal}},
        {"sharp_maximal", {"sharp maximal function of degree k", op_sharp_maximal}},
        {"shifted_sharp_field", {"shifted sharp function on the lattice", op_shifted_sharp_field}},
        {"shifted_maximal_field", {"shifted maximal function on the lattice", op_shifted_maximal_field}},
        {"system_maximal_fields", {"maximal function of each shifted system", op_system_maximal_fields}},
        {"brute_force_sharp", {"sharp function over all lattice cubes", op_brute_force_sharp}},
        {"brute_force_maximal", {"maximal function over all lattice cubes", op_brute_force_maximal}},
        {"lattice_covering_ratio", {"all-cube over shifted maximal constant of an indicator", op_lattice_covering_ratio}},
        {"cz_decompose", {"Calderon-Zygmund cubes at height lambda", op_cz_decompose}},
        {"cz_decompose_bump", {"bump-weighted stopping cubes at height L", op_cz_decompose_bump}},
        {"bump_sum_holder", {"Hoelder bound on the bump sum", op_bump_sum_holder}},
        {"ratio_field", {"M_Q(f - P_Q f) / M#_k f", op_ratio_field}},
        {"measure", {"mu(Q)", op_measure}},
        {"superlevel_measure", {"mu{f > t} on Q", op_superlevel_measure}},
        {"lp_norm", {"L^p norm on Q", op_lp_norm}},
        {"weak_lorentz_norm", {"L^{r,inf} norm on Q", op_weak_lorentz_norm}},
        {"survival_function", {"normalized survival breakpoints", op_survival_function}},
        {"bump", {"w_r(Q)", op_bump}},
        {"ap_constant", {"[w]_{A_p}", op_ap_constant}},
        {"ainfty_constant", {"[w]_{A_inf}", op_ainfty_constant}},
        {"ap_bump_constant", {"[w]_{A_p^r}", op_ap_bump_constant}},
        {"cp_constant", {"ambient [w]_{C_p}", op_cp_constant}},
        {"cp_denominator", {"C_p denominator on one cube", op_cp_denominator}},
        {"rhi_delta", {"reverse Hoelder exponent from a constant", op_rhi_delta}},
        {"reverse_holder_check", {"reverse Hoelder margin", op_reverse_holder_check}},
        {"weight_report", {"all weight constants", op_weight_report}},
        {"orthonormal_basis", {"orthonormal polynomial basis", op_orthonormal_basis}},
        {"gamma_constant", {"sum of squared sup norms of the basis", op_gamma_constant}},
        {"project", {"P_Q f", op_project}},
        {"projection_bound_ratio", {"sup|P_Q f| / avg|f|", op_projection_bound_ratio}},
        {"osc_k", {"avg_Q |f - P_Q f|", op_osc_k}},
        {"bmo_norm", {"dyadic BMO_k norm, optionally weighted", op_bmo_norm}},
        {"optimality_check", {"projection against best L^1 fit", op_optimality_check}},
        {"dr_norm_estimate", {"D_r norm of a functional", op_dr_norm_estimate}},
        {"poincare_hypothesis_ratio", {"max avg|f - f_R| / a(R)", op_poincare_hypothesis_ratio}},
        {"verify_poincare", {"Poincare record", op_verify_poincare}},
        {"gradient_density", {"neighbour-jump density", op_gradient_density}},
        {"minimize_power_ratio", {"min over t > 1 of t^{1+a} / (t^a - 1)", op_minimize_power_ratio}},
    };
    return ops;
}

Json evaluate(const std::string& op, const std::vector<std::string>& raw_args) {
    const auto it = eval_ops().find(op);
    if (it == eval_ops().end()) throw ConfigError("unknown operation '" + op + "'");
    const auto& allowed = allowed_keys().at(op);
    Args args;
    for (const auto& token : raw_args) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw ConfigError("argument '" + token + "' is not key=value");
        const std::string key = token.substr(0, eq);
        if (!allowed.count(key)) throw ConfigError("unknown argument '" + key + "' for " + op);
        args[key] = token.substr(eq + 1);
    }
    try {
        return it->second.run(args);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::string render_plain(const Json& value) {
    if (value.is_number()) return format_double(value.get<double>());
    if (value.is_string()) return value.get<std::string>();
    if (value.is_array() && std::all_of(value.begin(), value.end(), [](const Json& v) { return v.is_number(); })) {
        std::string out;
        for (const auto& v : value) {
            if (!out.empty()) out += ',';
            out += format_double(v.get<double>());
        }
        return out;
    }
    return value.dump();
}

}  // namespace jnkit::cli
