#pragma once

// Cube functionals a(Q) >= 0, their dyadic D_r(w) norm, and the generalized
// Poincare check built on them.

#include <string>
#include <vector>

#include "jnkit/grid.hpp"
#include "jnkit/record.hpp"

namespace jnkit {

enum class FunctionalKind { measure_quotient, oscillation, table };

const char* to_string(FunctionalKind k);

/// Values of a(Q) for every dyadic cube of one grid, stored per level.
class Functional {
public:
    /// a(Q) = scale (mu(Q) / w(Q))^{1/r}; null mu or w means Lebesgue.
    static Functional measure_quotient(const GridConfig& cfg, const GridFunction* mu, const GridFunction* w, double r,
                                       double scale = 1.0);
    /// a(Q) = avg_Q |f - f_Q|.
    static Functional oscillation(const GridFunction& f);
    /// levels[k][flat index] = a(Q) for the cubes of level k.
    static Functional table(const GridConfig& cfg, std::vector<std::vector<double>> levels);

    FunctionalKind kind() const { return kind_; }
    const GridConfig& config() const { return cfg_; }
    double operator()(const DyadicCube& q) const { return levels_[q.level][q.flat_index(cfg_.dim)]; }
    /// c a(Q) for every Q.
    Functional scaled(double c) const;

private:
    FunctionalKind kind_ = FunctionalKind::table;
    GridConfig cfg_{};
    std::vector<std::vector<double>> levels_;
};

struct DrNorm {
    double value = 1.0;
    DyadicCube witness{};   ///< base cube attaining the sup
    bool infinite = false;  ///< a vanishes on a cube whose subcubes carry mass
};

/// Exact dyadic ||a||: sup over base cubes R in D(Q) and antichains P of D(R)
/// of (sum_P w(P) a(P)^r / (w(R) a(R)^r))^{1/r}, by a bottom-up DP where each
/// node keeps max(own term, sum of its children's optima). The trivial
/// antichain {R} makes the value at least 1. Null w means w = 1.
DrNorm dr_norm_estimate(const Functional& a, const GridFunction* w, double r, const DyadicCube& q);

/// Largest avg_R|f - f_R| / a(R) over R in D(Q) (0/0 := 0, x/0 := inf).
double poincare_hypothesis_ratio(const GridFunction& f, const Functional& a, const DyadicCube& q);

/// Generalized Poincare: ||f - f_Q||_{L^{r,inf}(Q, w/w(Q))} against
/// r [w]_{A_inf} ||a|| a(Q). Throws DomainError when avg_R|f - f_R| <= a(R)
/// fails for some R in D(Q), or when a(Q) = 0 with f non-constant on Q.
VerificationRecord verify_poincare(const GridFunction& f, const Functional& a, const GridFunction& w, double r,
                                   const DyadicCube& q);

/// Cell density 1 + sum over neighbouring cells of |f(x) - f(y)| / (max|f| + 1),
/// a discrete gradient mass used to build corpus functionals.
GridFunction gradient_density(const GridFunction& f);

}  // namespace jnkit
