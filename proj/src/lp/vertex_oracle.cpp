#include "bidgame/lp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace bidgame::lp {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kVertexTol = 1e-9;

struct Reduced {
    Matrix rows;  // r x n, linearly independent
    std::vector<double> rhs;
    bool inconsistent = false;
};

// Row reduction with partial pivoting; drops dependent rows.
Reduced reduce(const LinearProgram& lp)
{
    const std::size_t n = lp.num_vars();
    const std::size_t m = lp.num_rows();
    Matrix a(m, n + 1);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s = std::max(s, std::abs(lp.constraint_matrix(i, j)));
        const double inv = s > 0.0 ? 1.0 / s : 1.0;
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = lp.constraint_matrix(i, j) * inv;
        a(i, n) = lp.constraint_rhs[i] * inv;
    }

    std::size_t rank = 0;
    for (std::size_t c = 0; c < n && rank < m; ++c) {
        std::size_t piv = rank;
        for (std::size_t r = rank + 1; r < m; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c)))
                piv = r;
        if (std::abs(a(piv, c)) <= kRankTol)
            continue;
        for (std::size_t k = 0; k <= n; ++k)
            std::swap(a(rank, k), a(piv, k));
        for (std::size_t r = rank + 1; r < m; ++r) {
            const double f = a(r, c) / a(rank, c);
            if (f == 0.0)
                continue;
            for (std::size_t k = c; k <= n; ++k)
                a(r, k) -= f * a(rank, k);
        }
        ++rank;
    }

    Reduced out;
    for (std::size_t r = rank; r < m; ++r)
        if (std::abs(a(r, n)) > tol::feasibility)
            out.inconsistent = true;
    out.rows = Matrix(rank, n);
    out.rhs.resize(rank);
    for (std::size_t r = 0; r < rank; ++r) {
        for (std::size_t j = 0; j < n; ++j)
            out.rows(r, j) = a(r, j);
        out.rhs[r] = a(r, n);
    }
    return out;
}

double choose(std::size_t n, std::size_t k)
{
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

// LU with partial pivoting of a square system; solves repeatedly.
class SquareSolver {
public:
    explicit SquareSolver(Matrix a) : a_(std::move(a)), perm_(a_.rows())
    {
        const std::size_t k = a_.rows();
        for (std::size_t i = 0; i < k; ++i)
            perm_[i] = i;
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < k; ++r)
                if (std::abs(a_(r, c)) > std::abs(a_(piv, c)))
                    piv = r;
            if (std::abs(a_(piv, c)) <= kRankTol) {
                singular_ = true;
                return;
            }
            if (piv != c) {
                for (std::size_t j = 0; j < k; ++j)
                    std::swap(a_(c, j), a_(piv, j));
                std::swap(perm_[c], perm_[piv]);
            }
            for (std::size_t r = c + 1; r < k; ++r) {
                a_(r, c) /= a_(c, c);
                for (std::size_t j = c + 1; j < k; ++j)
                    a_(r, j) -= a_(r, c) * a_(c, j);
            }
        }
    }

    bool singular() const noexcept { return singular_; }

    std::vector<double> solve(const std::vector<double>& b) const
    {
        const std::size_t k = a_.rows();
        std::vector<double> y(k);
        for (std::size_t i = 0; i < k; ++i) {
            double v = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j)
                v -= a_(i, j) * y[j];
            y[i] = v;
        }
        for (std::size_t i = k; i-- > 0;) {
            double v = y[i];
            for (std::size_t j = i + 1; j < k; ++j)
                v -= a_(i, j) * y[j];
            y[i] = v / a_(i, i);
        }
        return y;
    }

private:
    Matrix a_;
    std::vector<std::size_t> perm_;
    bool singular_ = false;
};

}  // namespace

LpSolution enumerate_vertices_oracle(const LinearProgram& lp)
{
    check_shape(lp);
    const std::size_t n = lp.num_vars();
    const Reduced red = reduce(lp);
    LpSolution out;
    if (red.inconsistent)
        return out;  // infeasible

    const std::size_t r = red.rows.rows();
    const double patterns = choose(n, r) * std::ldexp(1.0, static_cast<int>(n - r));
    if (patterns > kOracleMaxPatterns)
        throw OracleRefused("vertex enumeration needs " + std::to_string(patterns) +
                            " patterns, above the oracle limit");

    std::optional<double> best;
    std::vector<double> best_x;

    std::vector<std::size_t> basic(r);
    for (std::size_t i = 0; i < r; ++i)
        basic[i] = i;

    std::vector<char> is_basic(n);
    std::vector<std::size_t> nonbasic;
    for (;;) {
        std::fill(is_basic.begin(), is_basic.end(), 0);
        for (std::size_t b : basic)
            is_basic[b] = 1;
        nonbasic.clear();
        bool usable = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (is_basic[j])
                continue;
            if (!std::isfinite(lp.var_lower[j]) && !std::isfinite(lp.var_upper[j]))
                usable = false;
            nonbasic.push_back(j);
        }

        if (usable) {
            Matrix bm(r, r);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t k = 0; k < r; ++k)
                    bm(i, k) = red.rows(i, basic[k]);
            const SquareSolver solver(std::move(bm));
            if (!solver.singular()) {
                const std::size_t nn = nonbasic.size();
                const std::size_t combos = std::size_t{1} << nn;
                std::vector<double> x(n);
                for (std::size_t mask = 0; mask < combos; ++mask) {
                    bool ok = true;
                    for (std::size_t k = 0; k < nn && ok; ++k) {
                        const std::size_t j = nonbasic[k];
                        const bool upper = (mask >> k) & 1U;
                        const double lo = lp.var_lower[j];
                        const double hi = lp.var_upper[j];
                        if (upper && lo == hi)
                            ok = false;  // same point as the lower pattern
                        else
                            x[j] = upper ? hi : lo;
                        if (!std::isfinite(x[j]))
                            ok = false;
                    }
                    if (!ok)
                        continue;
                    std::vector<double> rhs(red.rhs);
                    for (std::size_t i = 0; i < r; ++i)
                        for (std::size_t j : nonbasic)
                            rhs[i] -= red.rows(i, j) * x[j];
                    const std::vector<double> xb = solver.solve(rhs);
                    for (std::size_t k = 0; k < r && ok; ++k) {
                        const std::size_t j = basic[k];
                        double v = xb[k];
                        const double lo = lp.var_lower[j];
                        const double hi = lp.var_upper[j];
                        const double slack = kVertexTol * std::max(1.0, std::abs(v));
                        if (v < lo - slack || v > hi + slack)
                            ok = false;
                        x[j] = std::clamp(v, lo, hi);
                    }
                    if (!ok)
                        continue;
                    double obj = 0.0;
                    for (std::size_t j = 0; j < n; ++j)
                        obj += lp.objective_coeffs[j] * x[j];
                    if (!best || obj < *best - 1e-12) {
                        best = obj;
                        best_x = x;
                    }
                }
            }
        }

        // next combination of basic columns
        if (r == 0)
            break;
        std::size_t i = r;
        while (i > 0 && basic[i - 1] == n - r + (i - 1))
            --i;
        if (i == 0)
            break;
        ++basic[i - 1];
        for (std::size_t k = i; k < r; ++k)
            basic[k] = basic[k - 1] + 1;
    }

    if (!best)
        return out;
    out.status = LpStatus::optimal;
    out.values = std::move(best_x);
    out.objective_value = *best;
    return out;
}

}  // namespace bidgame::lp
