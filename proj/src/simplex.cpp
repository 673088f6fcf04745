#include "osar/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osar/common.hpp"
#include "osar/simd.hpp"

namespace osar {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-12;

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), ld_(cols + 1), t_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * ld_ + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * ld_ + c]; }
    double& rhs(std::size_t r) { return t_[r * ld_ + cols_]; }
    double* row(std::size_t r) { return t_.data() + r * ld_; }
    double* obj() { return row(rows_); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t r, std::size_t e) {
        const auto& k = simd::active();
        double* pr = row(r);
        k.scal(1.0 / pr[e], pr, ld_);
        pr[e] = 1.0;
        for (std::size_t i = 0; i <= rows_; ++i) {
            if (i == r) continue;
            double* ri = row(i);
            const double f = ri[e];
            if (f == 0.0) continue;
            k.axpy(-f, pr, ri, ld_);
            ri[e] = 0.0;
        }
        basis_[r] = e;
    }

    // Bland's rule over the columns allowed by `usable`.
    enum class Step { Pivoted, Optimal, Unbounded };
    Step step(const std::vector<char>& usable) {
        const double* z = obj();
        std::size_t e = cols_;
        for (std::size_t j = 0; j < cols_; ++j)
            if (usable[j] && z[j] > kCostTol) {
                e = j;
                break;
            }
        if (e == cols_) return Step::Optimal;
        std::size_t r = rows_;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows_; ++i) {
            const double a = at(i, e);
            if (a <= kPivotTol) continue;
            const double ratio = at(i, cols_) / a;
            // Ties go to the lowest-indexed basic variable.
            const bool tie = r != rows_ && std::abs(ratio - best) <= 1e-14;
            if (r == rows_ || (!tie && ratio < best) || (tie && basis_[i] < basis_[r])) {
                r = i;
                best = std::min(best, ratio);
            }
        }
        if (r == rows_) return Step::Unbounded;
        pivot(r, e);
        return Step::Pivoted;
    }

private:
    std::size_t rows_, cols_, ld_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
    const std::size_t n = lp.n, mle = lp.a_le.size(), meq = lp.a_eq.size();
    if (lp.c.size() != n || lp.b_le.size() != mle || lp.b_eq.size() != meq)
        throw InputError("solve_lp: inconsistent dimensions");
    const std::size_t m = mle + meq;
    const std::size_t cols = n + mle + meq;  // structural, slacks, artificials
    Tableau tab(m, cols);
    for (std::size_t i = 0; i < mle; ++i) {
        if (lp.a_le[i].size() != n || lp.b_le[i] < 0.0) throw InputError("solve_lp: bad <= row");
        std::copy(lp.a_le[i].begin(), lp.a_le[i].end(), tab.row(i));
        tab.at(i, n + i) = 1.0;
        tab.rhs(i) = lp.b_le[i];
        tab.basis()[i] = n + i;
    }
    for (std::size_t q = 0; q < meq; ++q) {
        const std::size_t i = mle + q;
        if (lp.a_eq[q].size() != n || lp.b_eq[q] < 0.0) throw InputError("solve_lp: bad = row");
        std::copy(lp.a_eq[q].begin(), lp.a_eq[q].end(), tab.row(i));
        tab.at(i, n + mle + q) = 1.0;
        tab.rhs(i) = lp.b_eq[q];
        tab.basis()[i] = n + mle + q;
    }

    LpResult res;
    const std::size_t max_pivots = 50 * (cols + m) + 1000;
    std::vector<char> usable(cols, 1);

    if (meq > 0) {
        // Phase one: maximize -sum(artificials); reduced costs are the column sums
        // of the equality rows.
        double* z = tab.obj();
        for (std::size_t q = 0; q < meq; ++q) {
            const double* r = tab.row(mle + q);
            for (std::size_t j = 0; j <= cols; ++j) z[j] += r[j];
        }
        for (std::size_t q = 0; q < meq; ++q) z[n + mle + q] = 0.0;
        for (;;) {
            const auto s = tab.step(usable);
            if (s != Tableau::Step::Pivoted) break;
            if (++res.pivots > max_pivots) {
                res.status = LpResult::Status::IterationLimit;
                return res;
            }
        }
        const double infeas = tab.obj()[cols];
        double scale = 1.0;
        for (double b : lp.b_eq) scale = std::max(scale, std::abs(b));
        if (infeas > 1e-9 * scale) {
            res.status = LpResult::Status::Infeasible;
            return res;
        }
        // Drive zero-level artificials out of the basis.
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis()[i] < n + mle) continue;
            for (std::size_t j = 0; j < n + mle; ++j)
                if (std::abs(tab.at(i, j)) > 1e-9) {
                    tab.pivot(i, j);
                    break;
                }
            // A row with no usable entry is redundant and stays on its artificial at zero.
        }
        for (std::size_t q = 0; q < meq; ++q) usable[n + mle + q] = 0;
    }

    // Phase two objective row: c_j - c_B' B^-1 A_j.
    double* z = tab.obj();
    std::fill(z, z + cols + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) z[j] = lp.c[j];
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t bj = tab.basis()[i];
        if (bj < n && lp.c[bj] != 0.0) simd::active().axpy(-lp.c[bj], tab.row(i), z, cols + 1);
    }
    for (;;) {
        const auto s = tab.step(usable);
        if (s == Tableau::Step::Optimal) break;
        if (s == Tableau::Step::Unbounded) {
            res.status = LpResult::Status::Unbounded;
            return res;
        }
        if (++res.pivots > max_pivots) {
            res.status = LpResult::Status::IterationLimit;
            return res;
        }
    }
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (tab.basis()[i] < n) res.x[tab.basis()[i]] = std::max(0.0, tab.rhs(i));
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += lp.c[j] * res.x[j];
    res.objective = obj;
    return res;
}

}  // namespace osar
