#pragma once

// Dyadic geometry on the ambient cube [0,1)^n and the piecewise-constant
// function model that every other module operates on.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace jnkit {

/// Raised for invalid inputs (bad parameters, non-positive weights, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation reaches a state that the mathematics rules out.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline constexpr int kMaxDim = 2;
inline constexpr int kMaxCellBits = 24;

/// Dimension n and depth J of the finest dyadic level.
struct GridConfig {
    int dim = 1;
    int depth = 1;

    /// Validating constructor.
    static GridConfig make(int dim, int depth);

    std::size_t side() const { return std::size_t{1} << depth; }
    std::size_t cells() const { return std::size_t{1} << (dim * depth); }
    double cell_volume() const;
    std::size_t children_per_cube() const { return std::size_t{1} << dim; }

    bool operator==(const GridConfig&) const = default;
};

/// A dyadic cube: level k and integer index in [0, 2^k)^n.
/// Unused index components stay zero when n = 1.
struct DyadicCube {
    int level = 0;
    std::array<std::uint32_t, kMaxDim> index{0, 0};

    static DyadicCube root() { return {}; }

    DyadicCube parent() const;
    DyadicCube child(int dim, unsigned which) const;
    double side_length() const;
    double volume(int dim) const;
    /// Row-major (x fastest) position of this cube inside its level.
    std::size_t flat_index(int dim) const;
    static DyadicCube from_flat(int dim, int level, std::size_t flat);

    bool contains(const DyadicCube& other) const;
    bool strictly_contains(const DyadicCube& other) const {
        return level < other.level && contains(other);
    }

    /// Finest cells covered by the cube, as row-major indices of the grid.
    std::vector<std::size_t> cells(const GridConfig& cfg) const;
    std::size_t cell_count(const GridConfig& cfg) const {
        return std::size_t{1} << (cfg.dim * (cfg.depth - level));
    }

    std::string to_string(int dim) const;
    bool operator==(const DyadicCube&) const = default;
};

/// Enumerates every dyadic cube of the tree rooted at `top`, parents first.
void for_each_cube(const GridConfig& cfg, const DyadicCube& top,
                   const std::function<void(const DyadicCube&)>& fn);

/// Finest-cell containing cube at a given level.
DyadicCube cube_of_cell(const GridConfig& cfg, std::size_t cell, int level);

enum class Interpretation { generic, weight };
enum class Provenance { explicit_values, exact_integral, midpoint_sample };

const char* to_string(Provenance p);

/// Piecewise-constant data on the 2^(nJ) finest cells, row-major with x fastest.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(GridConfig cfg, std::vector<double> values,
                 Interpretation interp = Interpretation::generic,
                 Provenance prov = Provenance::explicit_values);

    const GridConfig& config() const { return cfg_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t cell) const { return values_[cell]; }
    std::size_t size() const { return values_.size(); }
    Interpretation interpretation() const { return interp_; }
    Provenance provenance() const { return prov_; }
    bool is_weight() const { return interp_ == Interpretation::weight; }

    /// Same values reinterpreted as a weight; throws if any value is <= 0.
    GridFunction as_weight() const;
    GridFunction map(const std::function<double(double)>& fn) const;

private:
    GridConfig cfg_{};
    std::vector<double> values_;
    Interpretation interp_ = Interpretation::generic;
    Provenance prov_ = Provenance::explicit_values;
};

/// Per-level sums of cell values. Level sums are formed by adding the 2^n
/// children of each cube, so a parent average is exactly the mean of its
/// children's averages (division by powers of two is exact).
class DyadicSums {
public:
    DyadicSums() = default;
    DyadicSums(const GridConfig& cfg, std::span<const double> cell_values);

    const GridConfig& config() const { return cfg_; }
    /// Sum of cell values over the cube (not multiplied by the cell volume).
    double cell_sum(const DyadicCube& q) const { return levels_[q.level][q.flat_index(cfg_.dim)]; }
    double integral(const DyadicCube& q) const { return cell_sum(q) * cfg_.cell_volume(); }
    double average(const DyadicCube& q) const;
    std::span<const double> level(int k) const { return levels_[k]; }

private:
    GridConfig cfg_{};
    std::vector<std::vector<double>> levels_;
};

/// Exact mean of f over a dyadic cube.
double average(const GridFunction& f, const DyadicCube& q);

// ---------------------------------------------------------------------------
// Function construction

enum class FunctionKind { explicit_values, step, formula_exact, formula_midpoint, martingale, power };

/// Describes how to build a GridFunction. Serialized as one config line:
/// `kind key=value ...`.
struct FunctionSpec {
    FunctionKind kind = FunctionKind::explicit_values;
    /// explicit: one value per finest cell. step: 2^(n k) values on level-k cubes.
    std::vector<double> values;
    /// formula kinds: polynomial coefficients c0 + c1 x + ... (n = 1), or a
    /// tensor product of the same polynomial in each axis (n = 2).
    std::vector<double> coefficients;
    double alpha = 0.0;                 ///< power exponent
    std::array<double, kMaxDim> center{0.0, 0.0};
    std::uint64_t seed = 0;             ///< martingale seed
    double amplitude = 1.0;             ///< martingale increment scale
    bool weight = false;                ///< tag result as a weight

    std::string to_entry() const;
    static FunctionSpec parse_entry(const std::string& line);
    bool operator==(const FunctionSpec&) const = default;
};

GridFunction build_function(const GridConfig& cfg, const FunctionSpec& spec);

/// Clamp to [-height, height].
GridFunction truncate(const GridFunction& f, double height);

// ---------------------------------------------------------------------------
// Shifted lattices

/// Smallest odd integer strictly greater than n.
int shift_denominator(int dim);

/// n+1 translated dyadic systems; system j is the dyadic tree of
/// [0,1)^n + (j/p)(1,...,1). Cubes of level k <= J have corners on the lattice
/// of spacing 1/(p 2^J), which is the resolution used for shifted-scope work.
struct ShiftedLatticeSystem {
    GridConfig base{};
    int denominator = 3;            ///< p
    std::vector<double> shifts;     ///< j/p for j = 0..n

    std::size_t systems() const { return shifts.size(); }
    /// Cells per axis of the refined lattice, p 2^J.
    std::size_t refined_side() const { return static_cast<std::size_t>(denominator) << base.depth; }
    /// Refined-lattice offset of system j.
    long offset(std::size_t j) const { return static_cast<long>(j) << base.depth; }
};

ShiftedLatticeSystem shifted_systems(const GridConfig& cfg);

/// Axis-aligned cube on an integer lattice: origin (lattice units) and side.
struct LatticeCube {
    std::array<long, kMaxDim> origin{0, 0};
    long side = 1;
};

/// Largest ratio |Q_sys| / |Q| (side-length ratio to the n-th power) over
/// all base-grid-aligned cubes Q = [a, a + 2^-k)^n inside [0,1)^n, where
/// Q_sys is the smallest cube of any shifted system that contains Q.
/// Returns the side-length ratio (lengths, not volumes).
double covering_length_ratio(const ShiftedLatticeSystem& sys);

/// Values on a uniform lattice of `side` cells per axis, row-major, x fastest.
struct LatticeField {
    int dim = 1;
    std::size_t side = 0;
    std::vector<double> values;

    std::size_t cells() const { return values.size(); }
    double cell_volume() const;
};

/// Splits every base cell into factor^n lattice cells of equal value.
LatticeField refine(const GridFunction& f, int factor);

/// Base-grid value = minimum over the factor^n refined cells.
GridFunction coarsen_min(const LatticeField& field, const GridConfig& cfg, int factor);

// ---------------------------------------------------------------------------
// Export

std::string to_csv(const GridFunction& f);
/// 16-byte header (magic "JNKF", u32 n, u32 J, u32 reserved) then doubles.
std::vector<std::uint8_t> to_binary(const GridFunction& f);
GridFunction from_binary(std::span<const std::uint8_t> bytes);

}  // namespace jnkit
