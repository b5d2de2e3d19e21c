#include "bidgame/lp.hpp"

#include <algorithm>
#include <cmath>

namespace bidgame::lp {

namespace {

Matrix resized(const Matrix& m, std::size_t rows, std::size_t cols)
{
    Matrix out(rows, cols);
    for (std::size_t r = 0; r < std::min(rows, m.rows()); ++r)
        for (std::size_t c = 0; c < std::min(cols, m.cols()); ++c)
            out(r, c) = m(r, c);
    return out;
}

}  // namespace

std::size_t LinearProgram::add_var(double cost, double lower, double upper, std::string name)
{
    const std::size_t rows = constraint_rhs.size();
    const std::size_t idx = objective_coeffs.size();
    constraint_matrix = resized(constraint_matrix, rows, idx + 1);
    objective_coeffs.push_back(cost);
    var_lower.push_back(lower);
    var_upper.push_back(upper);
    if (!var_names.empty() || !name.empty()) {
        var_names.resize(idx);
        var_names.push_back(std::move(name));
    }
    return idx;
}

std::size_t LinearProgram::add_row(double rhs)
{
    const std::size_t idx = constraint_rhs.size();
    constraint_matrix = resized(constraint_matrix, idx + 1, objective_coeffs.size());
    constraint_rhs.push_back(rhs);
    return idx;
}

const char* to_string(LpStatus s) noexcept
{
    switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

void check_shape(const LinearProgram& lp)
{
    const std::size_t n = lp.objective_coeffs.size();
    const std::size_t m = lp.constraint_rhs.size();
    if (lp.constraint_matrix.rows() != m)
        throw LpShapeError("constraint_matrix has " + std::to_string(lp.constraint_matrix.rows()) +
                           " rows but constraint_rhs has " + std::to_string(m) + " entries");
    if (m > 0 && lp.constraint_matrix.cols() != n)
        throw LpShapeError("constraint_matrix has " + std::to_string(lp.constraint_matrix.cols()) +
                           " columns but there are " + std::to_string(n) + " objective coefficients");
    if (lp.var_lower.size() != n || lp.var_upper.size() != n)
        throw LpShapeError("bound vectors must have one entry per variable");
    if (!lp.var_names.empty() && lp.var_names.size() != n)
        throw LpShapeError("var_names must be empty or have one entry per variable");
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isnan(lp.var_lower[j]) || std::isnan(lp.var_upper[j]) || lp.var_lower[j] > lp.var_upper[j])
            throw LpShapeError("variable " + std::to_string(j) + " has inverted or NaN bounds");
        if (lp.var_lower[j] == kInf || lp.var_upper[j] == -kInf)
            throw LpShapeError("variable " + std::to_string(j) + " has an empty domain");
        if (!std::isfinite(lp.objective_coeffs[j]))
            throw LpShapeError("objective coefficient " + std::to_string(j) + " is not finite");
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(lp.constraint_rhs[i]))
            throw LpShapeError("rhs " + std::to_string(i) + " is not finite");
        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(lp.constraint_matrix(i, j)))
                throw LpShapeError("constraint coefficient (" + std::to_string(i) + "," + std::to_string(j) +
                                   ") is not finite");
    }
}

double max_row_residual(const LinearProgram& lp, const std::vector<double>& x)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        double scale = 0.0;
        double lhs = 0.0;
        for (std::size_t j = 0; j < lp.num_vars(); ++j) {
            scale = std::max(scale, std::abs(lp.constraint_matrix(i, j)));
            lhs += lp.constraint_matrix(i, j) * x[j];
        }
        const double r = std::abs(lhs - lp.constraint_rhs[i]);
        worst = std::max(worst, scale > 0.0 ? r / scale : r);
    }
    return worst;
}

double max_bound_violation(const LinearProgram& lp, const std::vector<double>& x)
{
    double worst = 0.0;
    for (std::size_t j = 0; j < lp.num_vars(); ++j) {
        worst = std::max(worst, lp.var_lower[j] - x[j]);
        worst = std::max(worst, x[j] - lp.var_upper[j]);
    }
    return worst;
}

}  // namespace bidgame::lp
