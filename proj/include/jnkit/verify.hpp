#pragma once

// Inequality checks. Each check evaluates both sides of one estimate on the
// grid and returns records whose constant is lhs / product(factors); budgets
// are applied later by the harness.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jnkit/functionals.hpp"
#include "jnkit/grid.hpp"
#include "jnkit/maximal.hpp"
#include "jnkit/record.hpp"
#include "jnkit/weights.hpp"

namespace jnkit {

// ---------------------------------------------------------------------------
// Tails

struct TailFit {
    std::vector<SurvivalPoint> points;
    double C = 0.0;
    double c = 0.0;          ///< mass ~ C exp(-c t)
    double residual = 0.0;   ///< RMS of the log-survival residual over the fitted points
    std::size_t used = 0;    ///< points inside the fitting window
    bool degenerate = false; ///< at most two breakpoints carry positive mass
    bool monotone = true;    ///< survival non-increasing in t
};

/// Log-linear least squares on the breakpoints with mass in [lo, hi]. When
/// fewer than two breakpoints fall in the window, every breakpoint with
/// t > 0 and positive mass is used instead.
TailFit fit_tail(const std::vector<SurvivalPoint>& s, double lo = 0.01, double hi = 0.5);

/// Largest c with mass(t) <= prefactor exp(-c t) at every breakpoint t > 0.
double admissible_rate(const std::vector<SurvivalPoint>& s, double prefactor);

struct BridgeCheck {
    double gamma_tilde = 0.0;   ///< sup_{p >= 1} ||F||_p / p
    double worst_ratio = 0.0;   ///< max over breakpoints of tail(t) / (2 exp(-t / (4 gamma_tilde)))
    bool hypothesis_holds = false;
    bool holds = false;
};

/// L^p to exponential-tail bridge on a probability space given by masses
/// summing to one: with gamma~ = sup_p ||F||_p / p, checks
/// mu{F > t} <= 2 exp(-t / (4 gamma~)) at every breakpoint.
BridgeCheck tail_bridge(std::span<const double> values, std::span<const double> masses);

// ---------------------------------------------------------------------------
// Checks

/// ((1/w_r(Q)) int_Q F^p w)^{1/p}.
double weighted_ratio_norm(const GridFunction& F, const GridFunction& w, double p, double r, const DyadicCube& q);

/// Maximal-over-sharp estimate, two records per p: against p r' (bump
/// normalization w_r(Q)) and against p [w]_{A_inf} (normalization w(Q) with
/// r = 1 + delta from the calibrated reverse Hoelder exponent).
std::vector<VerificationRecord> check_jn_ratio(const RatioField& F, const GridFunction& w,
                                               const std::vector<double>& ps, double r, const DyadicCube& q,
                                               double calibration = kRhiCalibrationAinfty);

struct GoodLambdaRow {
    double lambda = 0.0;
    double gamma = 0.0;
    double mass = 0.0;  ///< w({M_Q(f-f_Q) > lambda, M#f <= gamma lambda}) / w(Q)
};

struct TailReport {
    TailFit fit;
    std::vector<GoodLambdaRow> table;
    double good_lambda_rate = INFINITY;  ///< largest c2 with every row <= 2 exp(-c2 / (gamma [w]_{A_inf}))
    BridgeCheck bridge;
    std::vector<VerificationRecord> records;
};

/// Exponential tail of the ratio field under w/w(Q), the good-lambda table
/// over lambda x gamma, and the L^p-to-tail bridge on the same data.
TailReport check_exponential_tails(const RatioField& F, const GridFunction& w, const DyadicCube& q,
                                   const std::vector<double>& lambdas, const std::vector<double>& gammas);

/// ((1/w_r(Q)) int_Q (|f - P_Q f| / w)^{p'} w)^{1/p'}.
double weighted_deviation_norm(const GridFunction& f, const GridFunction& w, double p, double r, int degree,
                               const DyadicCube& q);

/// Bumped weighted-BMO estimate: factors p', [w]_{A_p^r}^{1/p}, (r')^{1/p'}, ||f||_{BMO_{w,r}}.
VerificationRecord check_weighted_bmo(const GridFunction& f, const GridFunction& w, double p, double r,
                                      const DyadicCube& q);

/// A_p form with w(Q) normalization: factors p', [w]_{A_p}^{1/p}, [w]_{A_inf}^{1/p'}, ||f||_{BMO_{w,1}}.
VerificationRecord check_weighted_bmo_ap(const GridFunction& f, const GridFunction& w, double p, const DyadicCube& q);

/// Smallest c with w({|f - f_Q| > t w}) / w(Q) <= 2 exp(-t / (c [w]_{A_1} ||f||_{BMO_{w,1}})).
VerificationRecord check_weighted_bmo_exponential(const GridFunction& f, const GridFunction& w, const DyadicCube& q);

/// ||M f||_{L^p(w)} against pq/(q-p) max(1, K log+ K) ||M# f||_{L^p(w)} with
/// K the ambient C_q constant; both operators in shifted scope. Throws
/// DomainError when q <= p or when M# f vanishes (constant f).
VerificationRecord check_sharp_norm_inequality(const GridFunction& f, const GridFunction& w, double p, double q);

struct WhitneyRow {
    double lambda = 0.0;
    double gamma = 0.0;
    std::size_t cubes = 0;
    double worst = 0.0;  ///< max over maximal cubes Q_w of |{Mf > 4^n lambda, M#f <= gamma lambda} cap Q_w| / |Q_w|
};

struct NondyadicReport {
    TailFit fit;
    std::vector<WhitneyRow> table;
    bool monotone = true;  ///< worst is non-decreasing in gamma for every lambda
    double whitney_C = 0.0, whitney_c = 0.0;  ///< least-squares fit of max_lambda worst ~ C exp(-c / gamma)
    double whitney_rate = INFINITY;           ///< largest c with every row <= 2 exp(-c / gamma)
    std::vector<VerificationRecord> records;
};

/// Non-dyadic tail of M((f - f_Q) 1_Q) / M#f over the ambient cube, and the
/// good-lambda estimate on the maximal dyadic cubes of {Mf > lambda}.
NondyadicReport check_nondyadic_jn(const GridFunction& f, const std::vector<double>& lambdas,
                                   const std::vector<double>& gammas);

/// Polynomial ratio field: records against r' gamma p.
std::vector<VerificationRecord> check_polynomial_jn(const RatioField& F, const GridFunction& w,
                                                    const std::vector<double>& ps, double r, const DyadicCube& q);

/// Polynomial weighted BMO: factors gamma, p', [w]_{A_p^r}^{1/p}, (r')^{1/p'}, ||f||_{BMO_k^r(w)}.
VerificationRecord check_polynomial_weighted_bmo(const GridFunction& f, const GridFunction& w, double p, double r,
                                                 int degree, const DyadicCube& q);

struct PowerRatioMinimum {
    double alpha = 0.0;
    double t_star = 0.0;   ///< (1 + alpha)^{1/alpha}
    double min = 0.0;      ///< (1 + alpha)^{1 + 1/alpha} / alpha
    double bound = 0.0;    ///< e (1 + 1/alpha)
    double search_t = 0.0;
    double search_min = 0.0;
    bool pass = false;     ///< min <= bound and the search agrees to 1e-9
};

/// min over t > 1 of t^{1+alpha} / (t^alpha - 1), closed form and golden section.
PowerRatioMinimum minimize_power_ratio(double alpha);

std::string to_json(const PowerRatioMinimum& m);

/// (avg_Q |f - f_Q|^p)^{1/p} against p ||f||_BMO (dyadic, unweighted).
VerificationRecord check_bmo_lp(const GridFunction& f, double p, const DyadicCube& q);

/// Smallest c with |{|f - f_Q| > t ||f||}| / |Q| <= 2 exp(-t / c).
VerificationRecord check_bmo_tail(const GridFunction& f, const DyadicCube& q);

}  // namespace jnkit
