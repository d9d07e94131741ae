#pragma once

// Maximal operators, sharp functions, Calderon-Zygmund stopping times and the
// distribution-function evaluators (measures of superlevel sets, L^p and weak
// Lorentz norms).

#include <optional>
#include <string>
#include <vector>

#include "jnkit/grid.hpp"
#include "jnkit/polybmo.hpp"

namespace jnkit {

enum class Scope { dyadic, shifted };

const char* to_string(Scope s);
Scope parse_scope(const std::string& s);

/// Oscillations at or below this fraction of max|f| on the cube are treated
/// as exact zeros (they are rounding residue of P_R f = f).
inline constexpr double kOscillationFloor = 1e-12;

/// M_Q h: per cell x of Q, the sup of avg_R |h| over dyadic R with x in R, R in D(Q).
/// One top-down pass carrying the running maximum. Cells outside Q are zero.
GridFunction local_dyadic_maximal(const GridFunction& h, const DyadicCube& q);

/// Per cell x of Q, sup over admissible R containing x of avg_R |f - P_R f|.
/// dyadic: R ranges over D(Q). shifted: R ranges over the cubes of all n+1
/// shifted systems contained in Q; each base cell gets the minimum of the
/// refined-lattice values inside it.
GridFunction sharp_maximal(const GridFunction& f, const DyadicCube& q, int degree, Scope scope);

/// Shifted-scope sharp function at the resolution of the refined lattice.
LatticeField shifted_sharp_field(const GridFunction& f, const DyadicCube& q, int degree);

/// Ambient maximal operator of h (extended by zero outside [0,1)^n) realized
/// over the cubes of all shifted systems with side <= 1, on the refined lattice.
LatticeField shifted_maximal_field(const GridFunction& h);

/// Per-system dyadic maximal functions M_j h on the refined lattice.
std::vector<LatticeField> system_maximal_fields(const GridFunction& h);

/// Oracles over every refined-lattice cube inside Q (sharp) or inside the
/// ambient cube (maximal). Only for small grids: throws when the refined
/// lattice has more than 2304 cells in 2-D or J > 6 in 1-D.
LatticeField brute_force_sharp(const GridFunction& f, const DyadicCube& q, int degree);
LatticeField brute_force_maximal(const GridFunction& h);

/// Length ratio of the best covering system cube over all refined-lattice
/// cubes inside [0,1)^n; its n-th power c_n gives M h <= c_n sum_j M_j h.
double lattice_covering_ratio(const ShiftedLatticeSystem& sys);

// ---------------------------------------------------------------------------
// Calderon-Zygmund decompositions

enum class CZMode { lebesgue, bump_weighted };

struct CZCertificate {
    std::string name;
    bool checked = false;  ///< false when the hypothesis for this bullet fails
    bool holds = false;
    double lhs = 0.0;      ///< worst-case left side
    double rhs = 0.0;      ///< matching right side
};

struct CZDecomposition {
    DyadicCube base{};
    double height = 0.0;  ///< lambda (lebesgue) or L (bump-weighted)
    CZMode mode = CZMode::lebesgue;
    double bump_r = 1.0;
    std::vector<DyadicCube> cubes;
    std::vector<double> cube_averages;  ///< avg_{Q_j}|h|, or (1/w_r(Q_j)) int |f - f_Q|
    bool root_triggers = false;         ///< Q itself meets the stopping condition
    std::vector<CZCertificate> certificates;

    bool all_checked_hold() const;
    double selected_volume(int dim) const;
};

/// Maximal strict dyadic descendants R of Q with avg_R |h| > lambda, with the
/// three stopping-time properties certified:
///   (i)   lambda < avg_{Q_j}|h| <= 2^n lambda  (upper bound needs avg_Q|h| <= lambda)
///   (ii)  lambda sum_j |Q_j| <= int_Q |h|   (i.e. sum |Q_j| <= |Q|/lambda once avg_Q|h| <= 1)
///   (iii) M_Q h <= lambda off the union     (needs avg_Q|h| <= lambda)
CZDecomposition cz_decompose(const GridFunction& h, const DyadicCube& q, double lambda);

/// Stopping time (1/w_r(R)) int_R |f - f_Q| > L, with ancestor bound, jump
/// bound, bump-sum bound and the off-union bound |f - f_Q| <= L w certified.
CZDecomposition cz_decompose_bump(const GridFunction& f, const DyadicCube& q, const GridFunction& w, double r,
                                  double L);

/// sum_j w_r(Q_j) <= w_r(Q) (sum_j |Q_j| / |Q|)^{1/r'} (Hoelder); returns {lhs, rhs}.
std::pair<double, double> bump_sum_holder(const CZDecomposition& cz, const GridFunction& w, double r);

std::string to_json(const CZDecomposition& cz, int dim);

// ---------------------------------------------------------------------------
// Ratio fields

struct RatioField {
    GridFunction values;  ///< M_Q(f - P_Q f) / M_k^# f on Q, zero elsewhere
    GridFunction numerator;
    GridFunction denominator;
    Scope scope = Scope::dyadic;
    int degree = 0;
};

/// 0/0 := 0. Throws InvariantError on a positive numerator over a zero denominator.
RatioField ratio_field(const GridFunction& f, const DyadicCube& q, int degree, Scope scope);

// ---------------------------------------------------------------------------
// Distribution functions. A null density means Lebesgue measure.

double measure(const DyadicCube& q, const GridConfig& cfg, const GridFunction* density);

/// mu({x in Q : F(x) > t}).
double superlevel_measure(const GridFunction& F, const DyadicCube& q, double t, const GridFunction* density = nullptr);

/// ((1/mu(Q)) int_Q |F|^p dmu)^{1/p}, or without the 1/mu(Q) when not normalized.
/// Any p > 0 is accepted (p < 1 gives the quasi-norm).
double lp_norm(const GridFunction& F, const DyadicCube& q, const GridFunction* density, double p,
               bool normalized = true);

/// sup_t t (mu{|F| > t} / mu(Q))^{1/r}, evaluated exactly over the values of F.
double weak_lorentz_norm(const GridFunction& F, const DyadicCube& q, const GridFunction* density, double r,
                         bool normalized = true);

struct SurvivalPoint {
    double t = 0.0;
    double mass = 0.0;  ///< mu{F > t} / mu(Q)
};

/// Survival function at t = 0 and at every distinct value of F on Q.
std::vector<SurvivalPoint> survival_function(const GridFunction& F, const DyadicCube& q,
                                             const GridFunction* density = nullptr);

/// Same, for a field on a uniform lattice over the whole ambient cube.
std::vector<SurvivalPoint> survival_function(const LatticeField& F, const LatticeField* density = nullptr);

std::string survival_csv(const std::vector<SurvivalPoint>& s);

}  // namespace jnkit
