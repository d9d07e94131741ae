#pragma once

// Orthonormal polynomial bases on [0,1]^n, projections P_Q onto polynomials of
// degree <= k on dyadic (or lattice) cubes, and the oscillations and BMO-type
// norms built from them.

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "jnkit/grid.hpp"

namespace jnkit {

inline constexpr int kMaxPolynomialDegree = 4;

/// Orthonormal basis of the degree-<=k polynomials under the normalized
/// L^2([0,1]^n) inner product. Element j is stored as coefficients over the
/// graded-lexicographic monomial list `exponents`.
struct PolynomialBasis {
    int degree = 0;
    int dim = 1;
    std::vector<std::array<int, kMaxDim>> exponents;
    std::vector<std::vector<double>> coefficients;  ///< [element][monomial]
    std::vector<double> sup_norms;                  ///< ||e_j||_inf on [0,1]^n
    double gamma = 1.0;                             ///< sum_j ||e_j||_inf^2

    std::size_t size() const { return coefficients.size(); }
    double evaluate(std::size_t j, double x, double y = 0.0) const;
    /// Evaluates sum_j c_j e_j at a point of [0,1]^n.
    double evaluate_combination(std::span<const double> c, double x, double y = 0.0) const;
    /// Gram matrix computed from exact monomial moments.
    std::vector<std::vector<double>> gram() const;
};

/// Gram-Schmidt over graded-lex monomials with exact monomial moments.
PolynomialBasis orthonormal_basis(int degree, int dim);

/// Basis cached per (degree, dim); safe to call from several threads.
const PolynomialBasis& cached_basis(int degree, int dim);

/// sup over [0,1]^n of |sum_j c_j e_j|, by dense sampling plus compass-search
/// refinement of the best samples (tolerance 1e-9 or better).
double polynomial_sup(const PolynomialBasis& basis, std::span<const double> coeffs);

double gamma_constant(const PolynomialBasis& basis);

/// Cell means of every basis element over the s^n cells of a cube cut into
/// s pieces per axis. Depends only on s, since e_{j,Q} = e_j((x - y)/l).
class ProjectionTable {
public:
    ProjectionTable(const PolynomialBasis& basis, std::size_t cells_per_side);

    std::size_t cells_per_side() const { return side_; }
    std::size_t cells() const { return cells_; }
    std::size_t elements() const { return means_.size(); }
    /// Mean of e_j over local cell i (row-major, x fastest).
    double mean(std::size_t j, std::size_t i) const { return means_[j][i]; }

    /// <f, e_{j,Q}> for every j, from the cube's cell values.
    std::vector<double> coefficients(std::span<const double> local_values) const;
    /// Cell averages of sum_j c_j e_{j,Q}.
    std::vector<double> evaluate(std::span<const double> coeffs) const;

private:
    std::size_t side_;
    std::size_t cells_;
    std::vector<std::vector<double>> means_;
};

/// Lazily builds and caches ProjectionTables for one basis.
class Projector {
public:
    explicit Projector(const PolynomialBasis& basis) : basis_(&basis) {}
    const PolynomialBasis& basis() const { return *basis_; }
    const ProjectionTable& table(std::size_t cells_per_side) const;

private:
    const PolynomialBasis* basis_;
    mutable std::mutex mutex_;
    mutable std::map<std::size_t, std::unique_ptr<ProjectionTable>> tables_;
};

/// Result of projecting onto a dyadic cube Q.
struct Projection {
    std::vector<double> coefficients;  ///< <f, e_{j,Q}>_Q
    std::vector<double> cell_values;   ///< P_Q f cell averages, ordered as Q.cells()
    GridFunction field;                ///< P_Q f on Q, zero elsewhere
};

/// Values of f on the cells of Q, ordered as Q.cells().
std::vector<double> gather(const GridFunction& f, const DyadicCube& q);

Projection project(const GridFunction& f, const DyadicCube& q, const PolynomialBasis& basis);

/// Coefficients <pi, e_{j,R}>_R of the polynomial pi = sum_i c_i e_{i,Q}
/// (given in the basis of Q) in the basis of R. Exact: tensor Gauss-Legendre
/// quadrature of sufficient order. Projecting a polynomial reproduces it, so
/// reproject(c, Q, Q) = c and P_R pi = pi for every R.
std::vector<double> reproject(const PolynomialBasis& basis, std::span<const double> coeffs, const DyadicCube& from,
                              const DyadicCube& to);

/// sup_Q |P_Q f| / avg_Q |f|; zero when f vanishes on Q.
double projection_bound_ratio(const GridFunction& f, const DyadicCube& q, const PolynomialBasis& basis);

/// osc_k(f, Q) = avg_Q |f - P_Q f|.
double osc_k(const GridFunction& f, const DyadicCube& q, const PolynomialBasis& basis);

/// Optional weighting for bmo_norm: divide by w_r(Q) instead of |Q|.
struct WeightedBy {
    const GridFunction* weight = nullptr;
    double r = 1.0;
};

struct NormWithWitness {
    double value = 0.0;
    DyadicCube witness{};
};

/// sup over dyadic Q of (1/|Q|) int_Q |f - P_Q f|, or of
/// (1/w_r(Q)) int_Q |f - P_Q f| when a weight is given.
NormWithWitness bmo_norm(const GridFunction& f, const PolynomialBasis& basis,
                         std::optional<WeightedBy> weighting = std::nullopt);

struct OptimalityReport {
    double osc = 0.0;      ///< avg |f - P_Q f|
    double best = 0.0;     ///< smallest avg |f - pi| found
    double ratio = 1.0;    ///< osc / best (1 when both vanish)
    double bound = 1.0;    ///< 1 + gamma
    bool pass = true;      ///< osc <= (1 + gamma) best
};

/// Searches for the best L^1 polynomial fit (exact median for k = 0,
/// exact coordinate-wise L^1 line searches otherwise) and compares it with
/// the projection residual.
OptimalityReport optimality_check(const GridFunction& f, const DyadicCube& q, const PolynomialBasis& basis);

}  // namespace jnkit
