// Python bindings. Functions take flat row-major cell values (x fastest) and a
// dimension; the depth J is inferred from the length.

#include <algorithm>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jnkit/harness.hpp"
#include "jnkit/maximal.hpp"
#include "jnkit/polybmo.hpp"
#include "jnkit/verify.hpp"
#include "jnkit/weights.hpp"

namespace py = pybind11;
using namespace jnkit;

namespace {

using CubeTuple = std::tuple<int, int, int>;  // level, x index, y index

GridConfig infer(std::size_t cells, int dim) {
    int J = 0;
    while ((std::size_t{1} << (dim * J)) < cells) ++J;
    if ((std::size_t{1} << (dim * J)) != cells)
        throw DomainError("value count must be 2^(n J), got " + std::to_string(cells));
    return GridConfig::make(dim, J);
}

GridFunction function(std::vector<double> v, int dim) {
    auto cfg = infer(v.size(), dim);
    return GridFunction(cfg, std::move(v));
}

GridFunction weight(std::vector<double> v, int dim) {
    auto cfg = infer(v.size(), dim);
    return GridFunction(cfg, std::move(v), Interpretation::weight);
}

DyadicCube cube(const CubeTuple& c, const GridConfig& cfg) {
    const auto [level, x, y] = c;
    const long side = 1L << std::clamp(level, 0, 30);
    if (level < 0 || level > cfg.depth || x < 0 || x >= side || y < 0 || y >= (cfg.dim == 2 ? side : 1))
        throw DomainError("cube (" + std::to_string(level) + ", " + std::to_string(x) + ", " + std::to_string(y) +
                          ") is not a dyadic cube of the grid");
    return DyadicCube{level, {static_cast<unsigned>(x), static_cast<unsigned>(y)}};
}

CubeTuple tuple(const DyadicCube& q) { return {q.level, static_cast<int>(q.index[0]), static_cast<int>(q.index[1])}; }

std::vector<double> values(const GridFunction& f) { return {f.values().begin(), f.values().end()}; }

py::object record(const VerificationRecord& r) {
    return py::module_::import("json").attr("loads")(to_json_line(r));
}

py::dict weight_constant(const WeightConstant& c) {
    py::dict d;
    d["value"] = c.value;
    d["witness"] = tuple(c.witness);
    d["overflow"] = c.overflow;
    return d;
}

const CubeTuple kRoot{0, 0, 0};

}  // namespace

PYBIND11_MODULE(_jnkit, m) {
    m.doc() = "Dyadic BMO, maximal function and weight computations on 2^(nJ) grids";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def(
        "build_function",
        [](const std::string& spec, int dim, int depth) {
            return values(build_function(GridConfig::make(dim, depth), FunctionSpec::parse_entry(spec)));
        },
        py::arg("spec"), py::arg("dim"), py::arg("depth"), "Cell values of a corpus entry such as 'power alpha=0.5'.");

    m.def(
        "dyadic_maximal",
        [](std::vector<double> v, int dim, const CubeTuple& q) {
            const auto f = function(std::move(v), dim);
            return values(local_dyadic_maximal(f, cube(q, f.config())));
        },
        py::arg("values"), py::arg("dim") = 1, py::arg("cube") = kRoot);

    m.def(
        "sharp_maximal",
        [](std::vector<double> v, int dim, int degree, const std::string& scope, const CubeTuple& q) {
            const auto f = function(std::move(v), dim);
            return values(sharp_maximal(f, cube(q, f.config()), degree, parse_scope(scope)));
        },
        py::arg("values"), py::arg("dim") = 1, py::arg("degree") = 0, py::arg("scope") = "dyadic",
        py::arg("cube") = kRoot);

    m.def(
        "cz_decompose",
        [](std::vector<double> v, double lambda, int dim, const CubeTuple& q) {
            const auto f = function(std::move(v), dim);
            const auto cz = cz_decompose(f, cube(q, f.config()), lambda);
            std::vector<std::pair<CubeTuple, double>> out;
            for (std::size_t i = 0; i < cz.cubes.size(); ++i) out.emplace_back(tuple(cz.cubes[i]), cz.cube_averages[i]);
            return out;
        },
        py::arg("values"), py::arg("lam"), py::arg("dim") = 1, py::arg("cube") = kRoot,
        "Stopping cubes and their averages of |h|.");

    m.def(
        "ap_constant", [](std::vector<double> w, double p, int dim) { return weight_constant(ap_constant(weight(std::move(w), dim), p)); },
        py::arg("weight"), py::arg("p"), py::arg("dim") = 1);
    m.def(
        "ainfty_constant",
        [](std::vector<double> w, int dim, const std::string& scope) {
            return weight_constant(ainfty_constant(weight(std::move(w), dim), parse_scope(scope)));
        },
        py::arg("weight"), py::arg("dim") = 1, py::arg("scope") = "dyadic");
    m.def(
        "ap_bump_constant",
        [](std::vector<double> w, double p, double r, int dim) {
            return weight_constant(ap_bump_constant(weight(std::move(w), dim), p, r));
        },
        py::arg("weight"), py::arg("p"), py::arg("r"), py::arg("dim") = 1);
    m.def(
        "cp_constant", [](std::vector<double> w, double p, int dim) { return weight_constant(cp_constant(weight(std::move(w), dim), p)); },
        py::arg("weight"), py::arg("p"), py::arg("dim") = 1);

    m.def(
        "project",
        [](std::vector<double> v, int degree, int dim, const CubeTuple& q) {
            const auto f = function(std::move(v), dim);
            const auto p = project(f, cube(q, f.config()), cached_basis(degree, dim));
            py::dict d;
            d["coefficients"] = p.coefficients;
            d["cell_values"] = p.cell_values;
            return d;
        },
        py::arg("values"), py::arg("degree"), py::arg("dim") = 1, py::arg("cube") = kRoot);
    m.def(
        "bmo_norm",
        [](std::vector<double> v, int degree, int dim) {
            const auto n = bmo_norm(function(std::move(v), dim), cached_basis(degree, dim));
            return std::make_pair(n.value, tuple(n.witness));
        },
        py::arg("values"), py::arg("degree") = 0, py::arg("dim") = 1, "Norm and the cube attaining it.");
    m.def(
        "gamma", [](int degree, int dim) { return cached_basis(degree, dim).gamma; }, py::arg("degree"),
        py::arg("dim") = 1);

    m.def(
        "minimize_power_ratio",
        [](double alpha) {
            const auto r = minimize_power_ratio(alpha);
            py::dict d;
            d["t_star"] = r.t_star;
            d["min"] = r.min;
            d["bound"] = r.bound;
            d["search_min"] = r.search_min;
            d["pass"] = r.pass;
            return d;
        },
        py::arg("alpha"));
    m.def(
        "tail_bridge",
        [](const std::vector<double>& v, const std::vector<double>& mass) {
            const auto b = tail_bridge(v, mass);
            py::dict d;
            d["gamma_tilde"] = b.gamma_tilde;
            d["worst_ratio"] = b.worst_ratio;
            d["hypothesis_holds"] = b.hypothesis_holds;
            d["holds"] = b.holds;
            return d;
        },
        py::arg("values"), py::arg("masses"));

    m.def(
        "check_bmo_lp",
        [](std::vector<double> v, double p, int dim) {
            return record(check_bmo_lp(function(std::move(v), dim), p, DyadicCube::root()));
        },
        py::arg("values"), py::arg("p"), py::arg("dim") = 1);
    m.def(
        "check_weighted_bmo",
        [](std::vector<double> v, std::vector<double> w, double p, double r, int dim) {
            return record(check_weighted_bmo(function(std::move(v), dim), weight(std::move(w), dim), p, r,
                                             DyadicCube::root()));
        },
        py::arg("values"), py::arg("weight"), py::arg("p"), py::arg("r"), py::arg("dim") = 1);

    m.def(
        "verify",
        [](const std::string& config, const std::vector<std::string>& theorems) {
            const auto cfg = ExperimentConfig::load(config);
            const auto budgets = Budgets::load(cfg.budget_file);
            RunOptions opt;
            opt.theorems = {theorems.begin(), theorems.end()};
            RunResult run;
            {
                py::gil_scoped_release release;
                run = run_experiment(cfg, budgets, opt);
            }
            py::list out;
            for (const auto& r : run.records) out.append(record(r));
            return out;
        },
        py::arg("config"), py::arg("theorems") = std::vector<std::string>{},
        "Run a configured experiment and return its records as dicts.");
}
