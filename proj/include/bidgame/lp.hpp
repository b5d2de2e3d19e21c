#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bidgame::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Row-major dense matrix. Only what the solvers need.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// minimize c'x  subject to  A x = b,  lower <= x <= upper.
///
/// Bounds may be infinite. An empty var_names is allowed; otherwise it must
/// have one entry per column.
struct LinearProgram {
    std::vector<double> objective_coeffs;
    Matrix constraint_matrix;
    std::vector<double> constraint_rhs;
    std::vector<double> var_lower;
    std::vector<double> var_upper;
    std::vector<std::string> var_names;

    std::size_t num_vars() const noexcept { return objective_coeffs.size(); }
    std::size_t num_rows() const noexcept { return constraint_rhs.size(); }

    /// Appends a variable (a zero column) and returns its index.
    std::size_t add_var(double cost, double lower, double upper, std::string name = {});
    /// Appends an all-zero equality row with the given rhs and returns its index.
    std::size_t add_row(double rhs);
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus s) noexcept;

/// A basis of structural columns plus the bound each nonbasic column rests
/// on. Returned by an optimal solve and accepted as a starting point.
struct Basis {
    std::vector<std::size_t> columns;  // ascending
    std::vector<bool> at_upper;        // per structural column

    bool empty() const noexcept { return columns.empty(); }
};

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> values;  // empty unless optimal
    double objective_value = 0.0;
    // True when every movable nonbasic column has a strictly favourable
    // reduced cost at the final basis, which certifies that the minimizer is
    // unique. False means "possibly not unique".
    bool unique = false;
    int iterations = 0;
    Basis basis;  // empty unless optimal with no artificial left basic
    // Per structural column at the final basis, zero for basic columns.
    // Empty unless optimal.
    std::vector<double> reduced_costs;
    bool warm_started = false;

    bool optimal() const noexcept { return status == LpStatus::optimal; }
};

/// Malformed dimensions or inverted bounds.
class LpShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The vertex oracle refuses instances whose basis enumeration is too large.
class OracleRefused : public std::length_error {
public:
    using std::length_error::length_error;
};

namespace tol {
inline constexpr double feasibility = 1e-8;
inline constexpr double optimality = 1e-9;   // relative to max |c_j|
inline constexpr double phase1 = 1e-7;       // infeasibility threshold
inline constexpr double bound = 1e-9;
}  // namespace tol

/// Reduced-cost threshold below which a column counts as dual degenerate:
/// tol::optimality scaled by the largest |c_j|.
double dual_tolerance(const LinearProgram& lp);

/// Throws LpShapeError if the program violates its structural invariants.
void check_shape(const LinearProgram& lp);

/// Bounded-variable primal simplex, dense tableau, Bland's rule throughout.
/// Deterministic: identical inputs produce bit-identical outputs.
///
/// `start` may name a basis to begin phase 2 from. It is used only if it is
/// nonsingular and primal feasible for `lp`; otherwise the solve starts cold.
/// Columns of `lp` beyond start->at_upper rest at their default bound. Basic
/// values are always recomputed from the original rows with the basis in
/// ascending column order, so a solve that ends on the same basis returns the
/// same vector whichever way it got there.
LpSolution solve_lp(const LinearProgram& lp, const Basis* start = nullptr);

/// Upper bound on the number of bound/basis patterns the oracle will try.
inline constexpr double kOracleMaxPatterns = 4.0e6;

/// Exact optimum by enumerating every basic solution. Test oracle only.
///
/// Each candidate picks a basis of rank(A) columns; every other column sits at
/// one of its finite bounds. The pattern count C(n, r) * 2^(n - r) is
/// checked against kOracleMaxPatterns before any work is done. Assumes the
/// feasible region has a vertex and the objective is bounded on it (true for
/// finite bounds), so it never reports `unbounded`.
LpSolution enumerate_vertices_oracle(const LinearProgram& lp);

/// Largest |A x - b| over rows, each row scaled by its largest |coefficient|.
double max_row_residual(const LinearProgram& lp, const std::vector<double>& x);
/// Largest violation of var_lower / var_upper.
double max_bound_violation(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace bidgame::lp
