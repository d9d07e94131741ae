#pragma once

// Weight constants: A_p, A_1, A_infinity (Fujii-Wilson), bumped A_p^r, the
// ambient C_p constant, and reverse Hoelder margins. All suprema run over the
// dyadic cubes of the grid and report the cube that attains them.

#include <string>
#include <vector>

#include "jnkit/grid.hpp"
#include "jnkit/maximal.hpp"

namespace jnkit {

/// w_r(Q) = |Q| (avg_Q w^r)^{1/r}; r = 1 gives w(Q).
double bump(const GridFunction& w, const DyadicCube& q, double r);

struct WeightConstant {
    double value = 1.0;
    DyadicCube witness{};
    bool overflow = false;  ///< intermediate averages left the double range
    std::string witness_label;  ///< human-readable witness (shifted scope uses lattice cubes)
};

/// [w]_{A_p}: sup over dyadic Q of (avg w)(avg w^{1-p'})^{p-1}; p = 1 gives
/// ess sup M w / w with the ambient dyadic maximal operator.
WeightConstant ap_constant(const GridFunction& w, double p);

/// [w]_{A_infinity} = sup_Q int_Q M_Q(w 1_Q) / w(Q). The shifted scope also
/// ranges over the cubes (and localized trees) of every shifted system.
WeightConstant ainfty_constant(const GridFunction& w, Scope scope = Scope::dyadic);

/// [w]_{A_p^r} = sup_Q (avg w^r)^{1/r} (avg w^{1-p'})^{p-1}.
WeightConstant ap_bump_constant(const GridFunction& w, double p, double r);

/// int_{[0,1)^n} (M 1_Q)^p w for the ambient dyadic maximal operator.
double cp_denominator(const GridFunction& w, const DyadicCube& q, double p, const DyadicSums& w_sums);

/// Ambient [w]_{C_p}: sup_Q int_Q M(w 1_Q) / int_{[0,1)^n} (M 1_Q)^p w.
WeightConstant cp_constant(const GridFunction& w, double p);

enum class RhiMode { ainfty, cp };

/// delta = 1/(c K) in A_infinity mode, 1/(c (K + 1)) in C_p mode.
double rhi_delta(RhiMode mode, double constant, double calibration);

/// Pinned calibration constants c (the smallest round value for which the
/// reverse Hoelder check passes on the whole bundled weight corpus).
inline constexpr double kRhiCalibrationAinfty = 0.5;
inline constexpr double kRhiCalibrationCp = 0.25;

struct ReverseHolderReport {
    double delta = 0.0;
    double max_ratio = 0.0;  ///< max over Q of (avg w^{1+delta})^{1/(1+delta)} / RHS(Q)
    DyadicCube witness{};
    bool pass = false;       ///< max_ratio <= 1
};

/// RHS(Q) = 2 avg_Q w (A_infinity mode) or 2 |Q|^{-1} int (M 1_Q)^p w (C_p mode).
ReverseHolderReport reverse_holder_check(const GridFunction& w, double delta, RhiMode mode, double p = 2.0);

struct WeightReport {
    std::vector<std::pair<double, WeightConstant>> ap;  ///< per requested p
    WeightConstant a1;
    WeightConstant ainfty;
    double bump_r = 2.0;
    std::vector<std::pair<double, WeightConstant>> ap_bump;  ///< per requested p, at bump_r
    std::vector<std::pair<double, WeightConstant>> cp;       ///< ambient C_p per requested p
    ReverseHolderReport rhi_ainfty;
};

WeightReport weight_report(const GridFunction& w, const std::vector<double>& p_list, double bump_r);

std::string to_json(const WeightReport& report, int dim);

}  // namespace jnkit
