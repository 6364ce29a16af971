#include <catch2/catch_amalgamated.hpp>

#include "relucert/linprog.hpp"

using namespace relucert;

namespace {

LpResult maximize(std::vector<std::vector<double>> A, std::vector<double> b,
                  std::vector<double> c) {
    LpProblem lp;
    lp.ineq_lhs = std::move(A);
    lp.ineq_rhs = std::move(b);
    lp.objective = std::move(c);
    return solve_lp(lp);
}

} // namespace

TEST_CASE("simple vertex optimum") {
    // max x + y  s.t.  x <= 2, y <= 3, x + y <= 4  ->  (1,3) or (2,2), value 4.
    LpResult r = maximize({{1, 0}, {0, 1}, {1, 1}}, {2, 3, 4}, {1, 1});
    REQUIRE(r.status == LpResult::Status::Optimal);
    CHECK(r.value == Catch::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("negative rhs requires phase one") {
    // max -x  s.t.  -x <= -1  (x >= 1)  ->  x = 1.
    LpResult r = maximize({{-1.0}}, {-1.0}, {-1.0});
    REQUIRE(r.status == LpResult::Status::Optimal);
    CHECK(r.x[0] == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("free variables can be negative") {
    // max -x  s.t.  x >= -5  ->  x = -5.
    LpResult r = maximize({{-1.0}}, {5.0}, {-1.0});
    REQUIRE(r.status == LpResult::Status::Optimal);
    CHECK(r.x[0] == Catch::Approx(-5.0).epsilon(1e-12));
}

TEST_CASE("infeasible detection") {
    // x <= 0 and x >= 1.
    LpResult r = maximize({{1.0}, {-1.0}}, {0.0, -1.0}, {1.0});
    CHECK(r.status == LpResult::Status::Infeasible);
}

TEST_CASE("unbounded detection") {
    LpResult r = maximize({{-1.0}}, {0.0}, {1.0});
    CHECK(r.status == LpResult::Status::Unbounded);
}

TEST_CASE("equality constraints") {
    // max y  s.t.  x + y = 1, 0 <= x <= 1, y <= 5  ->  x = 0, y = 1.
    LpProblem lp;
    lp.eq_lhs = {{1, 1}};
    lp.eq_rhs = {1};
    lp.ineq_lhs = {{-1, 0}, {1, 0}, {0, 1}};
    lp.ineq_rhs = {0, 1, 5};
    lp.objective = {0, 1};
    LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpResult::Status::Optimal);
    CHECK(r.x[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(r.x[1] == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chebyshev-style ball radius") {
    // max t  s.t.  t <= x, t <= 1 - x  on the segment [0,1]: t* = 1/2 at x = 1/2.
    LpResult r = maximize({{-1, 1}, {1, 1}}, {0.0, 1.0}, {0, 1});
    REQUIRE(r.status == LpResult::Status::Optimal);
    CHECK(r.value == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(r.x[0] == Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("degenerate constraints do not cycle") {
    // Redundant duplicated rows around the same vertex.
    LpResult r = maximize({{1, 0}, {1, 0}, {0, 1}, {0, 1}, {1, 1}, {1, 1}},
                          {1, 1, 1, 1, 2, 2}, {1, 1});
    REQUIRE(r.status == LpResult::Status::Optimal);
    CHECK(r.value == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("deterministic output") {
    LpProblem lp;
    lp.ineq_lhs = {{1, 2}, {3, 1}, {-1, 0}, {0, -1}};
    lp.ineq_rhs = {4, 6, 0, 0};
    lp.objective = {1, 1};
    LpResult a = solve_lp(lp);
    LpResult b = solve_lp(lp);
    REQUIRE(a.status == LpResult::Status::Optimal);
    CHECK(a.x == b.x);
    CHECK(a.value == b.value);
}

TEST_CASE("redundant equality rows") {
    // Same equality twice; solution is still the segment endpoint.
    LpProblem lp;
    lp.eq_lhs = {{1, 1}, {1, 1}};
    lp.eq_rhs = {1, 1};
    lp.ineq_lhs = {{-1, 0}, {0, -1}};
    lp.ineq_rhs = {0, 0};
    lp.objective = {1, 0};
    LpResult r = solve_lp(lp);
    REQUIRE(r.status == LpResult::Status::Optimal);
    CHECK(r.value == Catch::Approx(1.0).epsilon(1e-12));
}

#include "relucert/rng.hpp"

namespace {

// Solve the n x n system M y = r by Gaussian elimination with partial
// pivoting; returns false when singular.
bool solve_square(std::vector<std::vector<double>> M, std::vector<double> r,
                  std::vector<double>& y) {
    const std::size_t n = r.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(M[i][col]) > std::abs(M[piv][col])) piv = i;
        if (std::abs(M[piv][col]) < 1e-9) return false;
        std::swap(M[piv], M[col]);
        std::swap(r[piv], r[col]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col) continue;
            double f = M[i][col] / M[col][col];
            for (std::size_t j = col; j < n; ++j) M[i][j] -= f * M[col][j];
            r[i] -= f * r[col];
        }
    }
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = r[i] / M[i][i];
    return true;
}

} // namespace

TEST_CASE("simplex agrees with brute-force vertex enumeration") {
    // Random bounded LPs: every optimum sits at an intersection of n active
    // constraints, so enumerating all n-subsets of rows is an exact oracle.
    relucert::CounterRng rng(37);
    int solved = 0;
    for (int t = 0; t < 300; ++t) {
        relucert::CounterRng g = rng.split(t);
        std::uint64_t ctr = 0;
        const std::size_t n = 2 + g.below(ctr++, 2);
        const std::size_t m = 3 + g.below(ctr++, 6);
        LpProblem lp;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> row(n);
            for (double& v : row) v = g.uniform(ctr++, -3.0, 3.0);
            lp.ineq_lhs.push_back(row);
            lp.ineq_rhs.push_back(g.uniform(ctr++, -2.0, 4.0));
        }
        for (std::size_t j = 0; j < n; ++j) { // box rows keep it bounded
            std::vector<double> row(n, 0.0);
            row[j] = 1.0;
            lp.ineq_lhs.push_back(row);
            lp.ineq_rhs.push_back(10.0);
            row[j] = -1.0;
            lp.ineq_lhs.push_back(row);
            lp.ineq_rhs.push_back(10.0);
        }
        lp.objective.resize(n);
        for (double& v : lp.objective) v = g.uniform(ctr++, -2.0, 2.0);

        const std::size_t rows = lp.ineq_lhs.size();
        bool any = false;
        double best = 0.0;
        std::vector<std::size_t> idx(n, 0);
        // Iterate all n-subsets of the rows.
        std::vector<std::size_t> comb(n);
        for (std::size_t j = 0; j < n; ++j) comb[j] = j;
        for (;;) {
            std::vector<std::vector<double>> M(n);
            std::vector<double> r(n);
            for (std::size_t j = 0; j < n; ++j) {
                M[j] = lp.ineq_lhs[comb[j]];
                r[j] = lp.ineq_rhs[comb[j]];
            }
            std::vector<double> y;
            if (solve_square(M, r, y)) {
                bool feasible = true;
                for (std::size_t i = 0; i < rows && feasible; ++i) {
                    double lhs = 0.0;
                    for (std::size_t j = 0; j < n; ++j) lhs += lp.ineq_lhs[i][j] * y[j];
                    if (lhs > lp.ineq_rhs[i] + 1e-7) feasible = false;
                }
                if (feasible) {
                    double val = 0.0;
                    for (std::size_t j = 0; j < n; ++j) val += lp.objective[j] * y[j];
                    if (!any || val > best) best = val;
                    any = true;
                }
            }
            // next combination
            std::size_t k = n;
            while (k > 0 && comb[k - 1] == rows - n + (k - 1)) --k;
            if (k == 0) break;
            ++comb[k - 1];
            for (std::size_t j = k; j < n; ++j) comb[j] = comb[j - 1] + 1;
        }

        LpResult res = solve_lp(lp);
        if (!any) {
            REQUIRE(res.status == LpResult::Status::Infeasible);
        } else {
            REQUIRE(res.status == LpResult::Status::Optimal);
            REQUIRE(res.value == Catch::Approx(best).margin(1e-6));
            ++solved;
        }
    }
    REQUIRE(solved >= 150); // most random instances are feasible
}

TEST_CASE("equality-constrained simplex agrees with vertex enumeration") {
    relucert::CounterRng rng(41);
    int solved = 0;
    for (int t = 0; t < 200; ++t) {
        relucert::CounterRng g = rng.split(t);
        std::uint64_t ctr = 0;
        const std::size_t n = 2 + g.below(ctr++, 2);
        const std::size_t m = 3 + g.below(ctr++, 5);
        LpProblem lp;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> row(n);
            for (double& v : row) v = g.uniform(ctr++, -3.0, 3.0);
            lp.ineq_lhs.push_back(row);
            lp.ineq_rhs.push_back(g.uniform(ctr++, -1.0, 4.0));
        }
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> row(n, 0.0);
            row[j] = 1.0;
            lp.ineq_lhs.push_back(row);
            lp.ineq_rhs.push_back(10.0);
            row[j] = -1.0;
            lp.ineq_lhs.push_back(row);
            lp.ineq_rhs.push_back(10.0);
        }
        // One equality through a random interior-ish point.
        {
            std::vector<double> row(n);
            double rhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                row[j] = g.uniform(ctr++, -2.0, 2.0);
                rhs += row[j] * g.uniform(ctr++, -1.0, 1.0);
            }
            lp.eq_lhs.push_back(row);
            lp.eq_rhs.push_back(rhs);
        }
        lp.objective.resize(n);
        for (double& v : lp.objective) v = g.uniform(ctr++, -2.0, 2.0);

        // Oracle: the equality plus every (n-1)-subset of inequality rows.
        const std::size_t rows = lp.ineq_lhs.size();
        bool any = false;
        double best = 0.0;
        std::vector<std::size_t> comb(n - 1);
        for (std::size_t j = 0; j + 1 < n; ++j) comb[j] = j;
        for (;;) {
            std::vector<std::vector<double>> M(n);
            std::vector<double> r(n);
            M[0] = lp.eq_lhs[0];
            r[0] = lp.eq_rhs[0];
            for (std::size_t j = 0; j + 1 < n; ++j) {
                M[j + 1] = lp.ineq_lhs[comb[j]];
                r[j + 1] = lp.ineq_rhs[comb[j]];
            }
            std::vector<double> y;
            if (solve_square(M, r, y)) {
                bool feasible = true;
                for (std::size_t i = 0; i < rows && feasible; ++i) {
                    double lhs = 0.0;
                    for (std::size_t j = 0; j < n; ++j) lhs += lp.ineq_lhs[i][j] * y[j];
                    if (lhs > lp.ineq_rhs[i] + 1e-7) feasible = false;
                }
                if (feasible) {
                    double val = 0.0;
                    for (std::size_t j = 0; j < n; ++j) val += lp.objective[j] * y[j];
                    if (!any || val > best) best = val;
                    any = true;
                }
            }
            std::size_t k = n - 1;
            while (k > 0 && comb[k - 1] == rows - (n - 1) + (k - 1)) --k;
            if (k == 0) break;
            ++comb[k - 1];
            for (std::size_t j = k; j + 1 < n; ++j) comb[j] = comb[j - 1] + 1;
        }

        LpResult res = solve_lp(lp);
        if (!any) {
            // The oracle found no feasible vertex; the LP itself may still be
            // feasible only if the optimum is not at a vertex, which cannot
            // happen for a bounded LP. Expect infeasibility.
            REQUIRE(res.status == LpResult::Status::Infeasible);
        } else {
            REQUIRE(res.status == LpResult::Status::Optimal);
            REQUIRE(res.value == Catch::Approx(best).margin(1e-6));
            ++solved;
        }
    }
    REQUIRE(solved >= 100);
}
