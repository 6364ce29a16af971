#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "relucert/errors.hpp"

namespace relucert {

// Dense two-phase simplex for the small LPs that drive the chamber geometry
// (a handful of variables, a few dozen rows). Bland's rule makes every solve
// deterministic and cycle-free.
//
//   maximize c.x   subject to   A x <= b,  E x = f,  x free.
//
// Free variables are split as x = xp - xm internally.
struct LpProblem {
    std::vector<std::vector<double>> ineq_lhs; // rows of A
    std::vector<double> ineq_rhs;              // b
    std::vector<std::vector<double>> eq_lhs;   // rows of E
    std::vector<double> eq_rhs;                // f
    std::vector<double> objective;             // c
};

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    std::vector<double> x;
    double value = 0.0;
};

namespace detail {

class SimplexTableau {
public:
    // Rows are the standard-form equalities [A' | I_slack | I_art] X = rhs
    // with rhs >= 0; columns 0..ncols-1 are structural+slack, then
    // artificials.
    SimplexTableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_(rows + 1, std::vector<double>(cols + 1, 0.0)), basis_(rows, 0) {}

    std::vector<std::vector<double>>& data() { return t_; }
    std::vector<std::size_t>& basis() { return basis_; }

    // Minimizes the cost row t_[m_] over columns [0, limit). Returns false on
    // unboundedness.
    bool iterate(std::size_t limit) {
        constexpr double kCostTol = 1e-9;
        constexpr double kPivTol = 1e-11;
        const std::size_t max_iters = 2000 * (m_ + n_ + 8);
        for (std::size_t iter = 0; iter < max_iters; ++iter) {
            // Bland: entering column = lowest index with negative reduced cost.
            std::size_t enter = limit;
            for (std::size_t j = 0; j < limit; ++j) {
                if (t_[m_][j] < -kCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter == limit) return true; // optimal
            // Ratio test; ties resolved by lowest basis index (Bland).
            std::size_t leave = m_;
            double best = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                double a = t_[i][enter];
                if (a <= kPivTol) continue;
                double ratio = t_[i][n_] / a;
                if (leave == m_ || ratio < best - 1e-12 ||
                    (ratio <= best + 1e-12 && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_) return false; // unbounded direction
            pivot(leave, enter);
        }
        throw Error("simplex: iteration limit reached");
    }

    void pivot(std::size_t row, std::size_t col) {
        double p = t_[row][col];
        for (double& v : t_[row]) v /= p;
        t_[row][col] = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == row) continue;
            double f = t_[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) t_[i][j] -= f * t_[row][j];
            t_[i][col] = 0.0;
        }
        basis_[row] = col;
    }

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

private:
    std::size_t m_, n_;
    std::vector<std::vector<double>> t_;
    std::vector<std::size_t> basis_;
};

} // namespace detail

inline LpResult solve_lp(const LpProblem& lp) {
    const std::size_t n = lp.objective.size();
    const std::size_t m1 = lp.ineq_lhs.size();
    const std::size_t m2 = lp.eq_lhs.size();
    const std::size_t m = m1 + m2;
    for (const auto& r : lp.ineq_lhs)
        if (r.size() != n) throw DimMismatch("solve_lp: inequality row length mismatch");
    for (const auto& r : lp.eq_lhs)
        if (r.size() != n) throw DimMismatch("solve_lp: equality row length mismatch");
    if (lp.ineq_rhs.size() != m1 || lp.eq_rhs.size() != m2)
        throw DimMismatch("solve_lp: rhs length mismatch");

    // Columns: xp(n), xm(n), slack(m1), artificial(m).
    const std::size_t nstruct = 2 * n + m1;
    const std::size_t ncols = nstruct + m;
    detail::SimplexTableau tab(m, ncols);
    auto& t = tab.data();

    for (std::size_t i = 0; i < m; ++i) {
        const bool is_ineq = i < m1;
        const std::vector<double>& row = is_ineq ? lp.ineq_lhs[i] : lp.eq_lhs[i - m1];
        double rhs = is_ineq ? lp.ineq_rhs[i] : lp.eq_rhs[i - m1];
        double sgn = rhs < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            t[i][j] = sgn * row[j];
            t[i][n + j] = -sgn * row[j];
        }
        if (is_ineq) t[i][2 * n + i] = sgn; // slack
        t[i][nstruct + i] = 1.0;            // artificial
        t[i][ncols] = sgn * rhs;
        tab.basis()[i] = nstruct + i;
    }

    // Phase 1: minimize the artificial sum.
    for (std::size_t j = 0; j < ncols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (tab.basis()[i] >= nstruct) s += t[i][j];
        t[m][j] = (j >= nstruct ? 1.0 : 0.0) - s;
    }
    {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += t[i][ncols];
        t[m][ncols] = -s;
    }
    if (!tab.iterate(ncols)) return {LpResult::Status::Infeasible, {}, 0.0};
    if (t[m][ncols] < -1e-7) return {LpResult::Status::Infeasible, {}, 0.0};

    // Drive any artificial still in the basis out (or leave it pinned at zero
    // on a redundant row).
    for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis()[i] < nstruct) continue;
        std::size_t col = nstruct;
        for (std::size_t j = 0; j < nstruct; ++j) {
            if (std::abs(t[i][j]) > 1e-9) {
                col = j;
                break;
            }
        }
        if (col < nstruct) tab.pivot(i, col);
    }

    // Phase 2: maximize c.x == minimize -c.(xp - xm); artificials are frozen
    // by restricting the column range.
    for (std::size_t j = 0; j <= ncols; ++j) t[m][j] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        t[m][j] = -lp.objective[j];
        t[m][n + j] = lp.objective[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t bj = tab.basis()[i];
        double f = t[m][bj];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j <= ncols; ++j) t[m][j] -= f * t[i][j];
    }
    if (!tab.iterate(nstruct)) return {LpResult::Status::Unbounded, {}, 0.0};

    std::vector<double> xp(n, 0.0), xm(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t bj = tab.basis()[i];
        if (bj < n)
            xp[bj] = t[i][ncols];
        else if (bj < 2 * n)
            xm[bj - n] = t[i][ncols];
    }
    LpResult res;
    res.status = LpResult::Status::Optimal;
    res.x.resize(n);
    res.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        res.x[j] = xp[j] - xm[j];
        res.value += lp.objective[j] * res.x[j];
    }
    return res;
}

} // namespace relucert
