#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <doctest.h>

#include "jnkit/grid.hpp"

namespace testing {

inline int depth_for(int n, std::size_t count) {
    int bits = 0;
    while ((std::size_t{1} << bits) < count) ++bits;
    return bits / n;
}

inline jnkit::GridFunction grid_fn(std::vector<double> v, int n = 1, bool weight = false) {
    const auto cfg = jnkit::GridConfig::make(n, depth_for(n, v.size()));
    return jnkit::GridFunction(cfg, std::move(v),
                               weight ? jnkit::Interpretation::weight : jnkit::Interpretation::generic);
}

inline jnkit::GridFunction weight_fn(std::vector<double> v, int n = 1) { return grid_fn(std::move(v), n, true); }

inline jnkit::GridFunction spec_fn(const std::string& entry, int n, int J) {
    return jnkit::build_function(jnkit::GridConfig::make(n, J), jnkit::FunctionSpec::parse_entry(entry));
}

inline std::vector<double> values(const jnkit::GridFunction& f) { return {f.values().begin(), f.values().end()}; }

inline bool rel_close(double a, double b, double tol = 1e-12) {
    if (a == b) return true;
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

#define CHECK_REL(a, b) CHECK_MESSAGE(::testing::rel_close((a), (b)), (a), " vs ", (b))
#define CHECK_REL_TOL(a, b, tol) CHECK_MESSAGE(::testing::rel_close((a), (b), (tol)), (a), " vs ", (b))

}  // namespace testing
