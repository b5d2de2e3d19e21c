#include "bidgame/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bidgame::lp {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kRatioTieTol = 1e-12;

enum class Rest : unsigned char { lower, upper, free_zero, basic };

// Dense bounded-variable tableau over the structural columns followed by one
// artificial column per row. Column `width` of the tableau holds B^-1 b.
class BoundedSimplex {
public:
    BoundedSimplex(const LinearProgram& lp)
        : n_(lp.num_vars())
    {
        scale_rows(lp);
        m_ = a_.rows();
        width_ = n_ + m_;
        lo_.resize(width_);
        hi_.resize(width_);
        cost_.assign(width_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) {
            lo_[j] = lp.var_lower[j];
            hi_[j] = lp.var_upper[j];
            cost_[j] = lp.objective_coeffs[j];
        }
        for (std::size_t i = 0; i < m_; ++i) {
            lo_[n_ + i] = 0.0;
            hi_[n_ + i] = kInf;
        }
        dual_tol_ = dual_tolerance(lp);
    }

    LpSolution solve(const Basis* start)
    {
        LpSolution out;
        if (infeasible_rows_) {
            out.status = LpStatus::infeasible;
            return out;
        }
        out.warm_started = start != nullptr && start_from(*start);
        if (!out.warm_started) {
            iterations_ = 0;
            start_phase1();
            if (!iterate(tol::optimality)) {
                // phase 1 is bounded below by zero; an unbounded ray here is a bug
                throw std::logic_error("simplex phase 1 reported an unbounded ray");
            }
            double infeas = 0.0;
            for (std::size_t i = 0; i < m_; ++i)
                infeas += x_[n_ + i];
            out.iterations = iterations_;
            if (infeas > tol::phase1) {
                out.status = LpStatus::infeasible;
                return out;
            }
            drive_out_artificials();
        }
        start_phase2();
        if (!iterate(dual_tol_)) {
            out.status = LpStatus::unbounded;
            out.iterations = iterations_;
            return out;
        }
        refactor_basic_values();

        out.status = LpStatus::optimal;
        out.iterations = iterations_;
        out.values.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
        double obj = 0.0;
        for (std::size_t j = 0; j < n_; ++j)
            obj += cost_[j] * out.values[j];
        out.objective_value = obj;
        out.unique = dual_nondegenerate();
        out.reduced_costs.assign(d_.begin(), d_.begin() + static_cast<std::ptrdiff_t>(n_));
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_)
                out.reduced_costs[basis_[i]] = 0.0;
        if (std::all_of(basis_.begin(), basis_.end(), [&](std::size_t c) { return c < n_; })) {
            out.basis.columns = basis_;
            std::sort(out.basis.columns.begin(), out.basis.columns.end());
            out.basis.at_upper.resize(n_);
            for (std::size_t j = 0; j < n_; ++j)
                out.basis.at_upper[j] = rest_[j] == Rest::upper;
        }
        return out;
    }

private:
    void scale_rows(const LinearProgram& lp)
    {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < lp.num_rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n_; ++j)
                s = std::max(s, std::abs(lp.constraint_matrix(i, j)));
            if (s == 0.0) {
                if (std::abs(lp.constraint_rhs[i]) > tol::feasibility)
                    infeasible_rows_ = true;
                continue;
            }
            keep.push_back(i);
            row_scale_.push_back(1.0 / s);
        }
        a_ = Matrix(keep.size(), n_);
        b_.resize(keep.size());
        for (std::size_t k = 0; k < keep.size(); ++k) {
            for (std::size_t j = 0; j < n_; ++j)
                a_(k, j) = lp.constraint_matrix(keep[k], j) * row_scale_[k];
            b_[k] = lp.constraint_rhs[keep[k]] * row_scale_[k];
        }
    }

    static double resting_value(double lo, double hi, Rest& rest)
    {
        if (std::isfinite(lo)) {
            rest = Rest::lower;
            return lo;
        }
        if (std::isfinite(hi)) {
            rest = Rest::upper;
            return hi;
        }
        rest = Rest::free_zero;
        return 0.0;
    }

    void start_phase1()
    {
        x_.assign(width_, 0.0);
        rest_.assign(width_, Rest::lower);
        for (std::size_t j = 0; j < n_; ++j)
            x_[j] = resting_value(lo_[j], hi_[j], rest_[j]);

        live_ = width_;
        t_ = Matrix(m_, width_ + 1);
        basis_.resize(m_);
        sign_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            double r = b_[i];
            for (std::size_t j = 0; j < n_; ++j)
                r -= a_(i, j) * x_[j];
            const double s = r >= 0.0 ? 1.0 : -1.0;
            sign_[i] = s;
            double* row = t_.row(i);
            for (std::size_t j = 0; j < n_; ++j)
                row[j] = s * a_(i, j);
            row[n_ + i] = 1.0;
            row[width_] = s * b_[i];
            basis_[i] = n_ + i;
            rest_[n_ + i] = Rest::basic;
            x_[n_ + i] = std::abs(r);
        }

        std::vector<double> c1(width_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            c1[n_ + i] = 1.0;
        price_out(c1);
    }

    // Loads the tableau for `start` by Gauss-Jordan elimination. Returns false,
    // leaving the state for start_phase1 to overwrite, when the basis is
    // malformed, singular or not primal feasible.
    bool start_from(const Basis& start)
    {
        if (start.columns.size() != m_)
            return false;
        std::vector<bool> used(n_, false);
        for (std::size_t c : start.columns) {
            if (c >= n_ || used[c])
                return false;
            used[c] = true;
        }

        x_.assign(width_, 0.0);
        rest_.assign(width_, Rest::lower);
        for (std::size_t j = 0; j < n_; ++j) {
            if (j < start.at_upper.size() && start.at_upper[j] && std::isfinite(hi_[j])) {
                x_[j] = hi_[j];
                rest_[j] = Rest::upper;
            } else {
                x_[j] = resting_value(lo_[j], hi_[j], rest_[j]);
            }
        }
        live_ = n_;
        t_ = Matrix(m_, width_ + 1);
        basis_.resize(m_);
        sign_.assign(m_, 1.0);
        d_.assign(width_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double* row = t_.row(i);
            for (std::size_t j = 0; j < n_; ++j)
                row[j] = a_(i, j);
            row[n_ + i] = 1.0;
            row[width_] = b_[i];
            basis_[i] = n_ + i;
            rest_[n_ + i] = Rest::basic;
        }
        std::vector<bool> row_taken(m_, false);
        for (std::size_t c : start.columns) {
            std::size_t p = m_;
            double best = 1e-9;
            for (std::size_t i = 0; i < m_; ++i) {
                if (!row_taken[i] && std::abs(t_(i, c)) > best) {
                    best = std::abs(t_(i, c));
                    p = i;
                }
            }
            if (p == m_)
                return false;
            const std::size_t art = basis_[p];
            pivot(p, c);
            rest_[art] = Rest::lower;
            row_taken[p] = true;
        }
        recompute_from_tableau();
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t c = basis_[i];
            const double tol = tol::feasibility * std::max(1.0, std::abs(x_[c]));
            if (x_[c] < lo_[c] - tol || x_[c] > hi_[c] + tol)
                return false;
        }
        return true;
    }

    void start_phase2()
    {
        for (std::size_t i = 0; i < m_; ++i) {
            lo_[n_ + i] = 0.0;
            hi_[n_ + i] = 0.0;
        }
        // Artificial columns can no longer enter; stop updating them.
        live_ = n_;
        price_out(cost_);
    }

    // d = c - c_B' T
    void price_out(const std::vector<double>& c)
    {
        d_.assign(c.begin(), c.end());
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = c[basis_[i]];
            if (cb == 0.0)
                continue;
            const double* row = t_.row(i);
            for (std::size_t j = 0; j < live_; ++j)
                d_[j] -= cb * row[j];
        }
        for (std::size_t i = 0; i < m_; ++i)
            d_[basis_[i]] = 0.0;
    }

    // Returns false on an unbounded ray.
    bool iterate(double dtol)
    {
        const std::size_t cap = 10000 + 100 * (m_ + width_);
        for (;;) {
            if (static_cast<std::size_t>(iterations_) > cap)
                throw std::runtime_error("simplex iteration limit exceeded");

            // Bland: lowest-index eligible column enters.
            std::size_t q = width_;
            double dir = 0.0;
            for (std::size_t j = 0; j < live_; ++j) {
                const Rest r = rest_[j];
                if (r == Rest::basic || lo_[j] == hi_[j])
                    continue;
                const double dj = d_[j];
                if ((r == Rest::lower || r == Rest::free_zero) && dj < -dtol) {
                    q = j;
                    dir = 1.0;
                    break;
                }
                if ((r == Rest::upper || r == Rest::free_zero) && dj > dtol) {
                    q = j;
                    dir = -1.0;
                    break;
                }
            }
            if (q == width_)
                return true;

            double best = (std::isfinite(lo_[q]) && std::isfinite(hi_[q])) ? hi_[q] - lo_[q] : kInf;
            std::size_t leave_row = m_;
            for (std::size_t i = 0; i < m_; ++i) {
                const double alpha = dir * t_(i, q);
                if (std::abs(alpha) <= kPivotTol)
                    continue;
                const std::size_t bv = basis_[i];
                double ratio;
                if (alpha > 0.0) {
                    if (!std::isfinite(lo_[bv]))
                        continue;
                    ratio = std::max(0.0, x_[bv] - lo_[bv]) / alpha;
                } else {
                    if (!std::isfinite(hi_[bv]))
                        continue;
                    ratio = std::max(0.0, hi_[bv] - x_[bv]) / -alpha;
                }
                if (ratio < best - kRatioTieTol) {
                    best = ratio;
                    leave_row = i;
                } else if (leave_row != m_ && ratio <= best + kRatioTieTol && bv < basis_[leave_row]) {
                    leave_row = i;
                }
            }
            if (!std::isfinite(best))
                return false;

            ++iterations_;
            const double step = dir * best;
            x_[q] += step;
            for (std::size_t i = 0; i < m_; ++i)
                x_[basis_[i]] -= step * t_(i, q);

            if (leave_row == m_) {
                // bound flip, basis unchanged
                if (dir > 0.0) {
                    x_[q] = hi_[q];
                    rest_[q] = Rest::upper;
                } else {
                    x_[q] = lo_[q];
                    rest_[q] = Rest::lower;
                }
                continue;
            }

            const std::size_t bv = basis_[leave_row];
            if (dir * t_(leave_row, q) > 0.0) {
                x_[bv] = lo_[bv];
                rest_[bv] = Rest::lower;
            } else {
                x_[bv] = hi_[bv];
                rest_[bv] = Rest::upper;
            }
            pivot(leave_row, q);
        }
    }

    void pivot(std::size_t p, std::size_t q)
    {
        const std::size_t rhs = width_;
        double* prow = t_.row(p);
        const double inv = 1.0 / prow[q];
        for (std::size_t j = 0; j < live_; ++j)
            prow[j] *= inv;
        prow[rhs] *= inv;
        prow[q] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == p)
                continue;
            double* row = t_.row(i);
            const double f = row[q];
            if (f == 0.0)
                continue;
            for (std::size_t j = 0; j < live_; ++j)
                row[j] -= f * prow[j];
            row[rhs] -= f * prow[rhs];
            row[q] = 0.0;
        }
        const double fd = d_[q];
        if (fd != 0.0) {
            for (std::size_t j = 0; j < live_; ++j)
                d_[j] -= fd * prow[j];
        }
        d_[q] = 0.0;
        basis_[p] = q;
        rest_[q] = Rest::basic;
    }

    void drive_out_artificials()
    {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_)
                continue;
            const std::size_t art = basis_[i];
            for (std::size_t j = 0; j < n_; ++j) {
                if (rest_[j] == Rest::basic || std::abs(t_(i, j)) <= 1e-9)
                    continue;
                pivot(i, j);
                x_[art] = 0.0;
                rest_[art] = Rest::lower;
                break;
            }
            // no structural entry: redundant row, the artificial stays basic at 0
        }
        for (std::size_t i = 0; i < m_; ++i)
            if (rest_[n_ + i] != Rest::basic)
                x_[n_ + i] = 0.0;
        recompute_from_tableau();
    }

    void recompute_from_tableau()
    {
        for (std::size_t i = 0; i < m_; ++i) {
            const double* row = t_.row(i);
            double v = row[width_];
            for (std::size_t j = 0; j < live_; ++j)
                if (rest_[j] != Rest::basic && x_[j] != 0.0)
                    v -= row[j] * x_[j];
            x_[basis_[i]] = v;
        }
    }

    // Solve B x_B = b - N x_N against the original scaled rows to shed the
    // drift accumulated by incremental updates.
    void refactor_basic_values()
    {
        if (m_ == 0)
            return;
        std::vector<std::size_t> cols = basis_;
        std::sort(cols.begin(), cols.end());
        Matrix aug(m_, m_ + 1);
        for (std::size_t i = 0; i < m_; ++i) {
            double rhs = b_[i];
            for (std::size_t j = 0; j < n_; ++j)
                if (rest_[j] != Rest::basic)
                    rhs -= a_(i, j) * x_[j];
            for (std::size_t k = 0; k < m_; ++k) {
                const std::size_t col = cols[k];
                aug(i, k) = col < n_ ? a_(i, col) : (col - n_ == i ? sign_[i] : 0.0);
            }
            aug(i, m_) = rhs;
        }
        for (std::size_t c = 0; c < m_; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < m_; ++r)
                if (std::abs(aug(r, c)) > std::abs(aug(piv, c)))
                    piv = r;
            if (std::abs(aug(piv, c)) < 1e-13)
                return;  // keep incremental values
            if (piv != c)
                for (std::size_t k = 0; k <= m_; ++k)
                    std::swap(aug(c, k), aug(piv, k));
            for (std::size_t r = c + 1; r < m_; ++r) {
                const double f = aug(r, c) / aug(c, c);
                if (f == 0.0)
                    continue;
                for (std::size_t k = c; k <= m_; ++k)
                    aug(r, k) -= f * aug(c, k);
            }
        }
        std::vector<double> xb(m_);
        for (std::size_t c = m_; c-- > 0;) {
            double v = aug(c, m_);
            for (std::size_t k = c + 1; k < m_; ++k)
                v -= aug(c, k) * xb[k];
            xb[c] = v / aug(c, c);
        }
        for (std::size_t k = 0; k < m_; ++k) {
            const std::size_t col = cols[k];
            double v = xb[k];
            if (v < lo_[col] && v > lo_[col] - tol::feasibility)
                v = lo_[col];
            if (v > hi_[col] && v < hi_[col] + tol::feasibility)
                v = hi_[col];
            x_[col] = v;
        }
    }

    bool dual_nondegenerate() const
    {
        for (std::size_t j = 0; j < n_; ++j) {
            const Rest r = rest_[j];
            if (r == Rest::basic || lo_[j] == hi_[j])
                continue;
            if (r == Rest::free_zero)
                return false;
            if (r == Rest::lower && !(d_[j] > dual_tol_))
                return false;
            if (r == Rest::upper && !(d_[j] < -dual_tol_))
                return false;
        }
        return true;
    }

    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::size_t width_ = 0;
    std::size_t live_ = 0;  // columns still maintained in the tableau
    Matrix a_;
    std::vector<double> b_;
    std::vector<double> row_scale_;
    bool infeasible_rows_ = false;

    std::vector<double> lo_, hi_, cost_;
    double dual_tol_ = tol::optimality;

    Matrix t_;
    std::vector<double> d_;
    std::vector<double> x_;
    std::vector<Rest> rest_;
    std::vector<std::size_t> basis_;
    std::vector<double> sign_;
    int iterations_ = 0;
};

}  // namespace

double dual_tolerance(const LinearProgram& lp)
{
    double cmax = 0.0;
    for (double c : lp.objective_coeffs)
        cmax = std::max(cmax, std::abs(c));
    return cmax > 0.0 ? tol::optimality * cmax : tol::optimality;
}

LpSolution solve_lp(const LinearProgram& lp, const Basis* start)
{
    check_shape(lp);
    return BoundedSimplex(lp).solve(start);
}

}  // namespace bidgame::lp
