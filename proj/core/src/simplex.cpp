#include "graspctl/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace graspctl {
namespace {

// Smallest column entry accepted as a pivot, kept apart from the optimality tolerance. Pivoting on
// entries near round-off wrecks the tableau long before the reduced costs notice.
constexpr double kPivotTolerance = 1e-9;

class Tableau {
public:
    Tableau(int rows, int cols) : m_(rows), n_(cols), t_(static_cast<std::size_t>(rows + 1) * (cols + 1), 0.0), basis_(rows, -1) {}

    double& at(int r, int c) { return t_[static_cast<std::size_t>(r) * (n_ + 1) + c]; }
    double at(int r, int c) const { return t_[static_cast<std::size_t>(r) * (n_ + 1) + c]; }
    double& rhs(int r) { return at(r, n_); }
    // Row m_ holds reduced costs (z_j - c_j) for the current objective; its rhs is the objective value.
    double& cost(int c) { return at(m_, c); }

    int rows() const { return m_; }
    int cols() const { return n_; }
    std::vector<int>& basis() { return basis_; }

    void pivot(int pr, int pc) {
        const double p = at(pr, pc);
        for (int c = 0; c <= n_; ++c) at(pr, c) /= p;
        for (int r = 0; r <= m_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (int c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis_[static_cast<std::size_t>(pr)] = pc;
    }

    // Loads the cost row for maximizing c.x given the current basis.
    void set_objective(const std::vector<double>& c) {
        for (int j = 0; j <= n_; ++j) {
            double z = 0.0;
            for (int r = 0; r < m_; ++r) {
                const int b = basis_[static_cast<std::size_t>(r)];
                if (b >= 0) z += c[static_cast<std::size_t>(b)] * at(r, j);
            }
            cost(j) = z - (j < n_ ? c[static_cast<std::size_t>(j)] : 0.0);
        }
    }

    LpStatus optimize(const std::vector<bool>& allowed, double tol, int max_iter) {
        for (int it = 0; it < max_iter; ++it) {
            int enter = -1;
            for (int j = 0; j < n_; ++j) {
                if (allowed[static_cast<std::size_t>(j)] && cost(j) < -tol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return LpStatus::Optimal;
            // Two-pass ratio test: among rows within tol of the smallest ratio, pivot on the largest entry.
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m_; ++r) {
                const double a = at(r, enter);
                if (a > kPivotTolerance) best = std::min(best, rhs(r) / a);
            }
            int leave = -1;
            for (int r = 0; r < m_; ++r) {
                const double a = at(r, enter);
                if (a <= kPivotTolerance || rhs(r) / a > best + tol) continue;
                if (leave < 0 || a > at(leave, enter) ||
                    (a == at(leave, enter) && basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)]))
                    leave = r;
            }
            if (leave < 0) return LpStatus::Unbounded;
            pivot(leave, enter);
        }
        return LpStatus::IterationLimit;
    }

private:
    int m_;
    int n_;
    std::vector<double> t_;
    std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, double tol) {
    const int nv = lp.num_vars();
    if (lp.free_variable.size() != static_cast<std::size_t>(nv)) throw std::invalid_argument("free_variable size mismatch");
    for (const auto& row : lp.rows)
        if (row.a.size() != static_cast<std::size_t>(nv)) throw std::invalid_argument("LP row width mismatch");

    // Column layout: [x+ (nv)] [x- for free vars] [slack/surplus per inequality row] [artificials]
    std::vector<int> neg_col(static_cast<std::size_t>(nv), -1);
    int col = nv;
    for (int j = 0; j < nv; ++j)
        if (lp.free_variable[static_cast<std::size_t>(j)]) neg_col[static_cast<std::size_t>(j)] = col++;

    const int m = static_cast<int>(lp.rows.size());
    std::vector<int> slack_col(static_cast<std::size_t>(m), -1);
    for (int r = 0; r < m; ++r)
        if (lp.rows[static_cast<std::size_t>(r)].sense != RowSense::Equal) slack_col[static_cast<std::size_t>(r)] = col++;
    const int first_art = col;

    // Decide per row whether the slack can start basic (<= with b >= 0, or >= with b <= 0).
    std::vector<double> sign(static_cast<std::size_t>(m), 1.0);
    std::vector<bool> needs_art(static_cast<std::size_t>(m), true);
    int n_art = 0;
    for (int r = 0; r < m; ++r) {
        const auto& row = lp.rows[static_cast<std::size_t>(r)];
        if (row.b < 0.0) sign[static_cast<std::size_t>(r)] = -1.0;
        const double slack_sign = row.sense == RowSense::LessEqual ? 1.0 : (row.sense == RowSense::GreaterEqual ? -1.0 : 0.0);
        if (slack_sign * sign[static_cast<std::size_t>(r)] > 0.0) needs_art[static_cast<std::size_t>(r)] = false;
        if (needs_art[static_cast<std::size_t>(r)]) ++n_art;
    }
    const int n_cols = first_art + n_art;

    Tableau tab(m, n_cols);
    int art = first_art;
    for (int r = 0; r < m; ++r) {
        const auto& row = lp.rows[static_cast<std::size_t>(r)];
        const double s = sign[static_cast<std::size_t>(r)];
        for (int j = 0; j < nv; ++j) {
            tab.at(r, j) = s * row.a[static_cast<std::size_t>(j)];
            if (neg_col[static_cast<std::size_t>(j)] >= 0) tab.at(r, neg_col[static_cast<std::size_t>(j)]) = -s * row.a[static_cast<std::size_t>(j)];
        }
        if (slack_col[static_cast<std::size_t>(r)] >= 0)
            tab.at(r, slack_col[static_cast<std::size_t>(r)]) = s * (row.sense == RowSense::LessEqual ? 1.0 : -1.0);
        tab.rhs(r) = s * row.b;
        if (needs_art[static_cast<std::size_t>(r)]) {
            tab.at(r, art) = 1.0;
            tab.basis()[static_cast<std::size_t>(r)] = art++;
        } else {
            tab.basis()[static_cast<std::size_t>(r)] = slack_col[static_cast<std::size_t>(r)];
        }
    }

    const int max_iter = 50 * (n_cols + m + 10);
    LpResult result;

    if (n_art > 0) {
        std::vector<double> c1(static_cast<std::size_t>(n_cols), 0.0);
        for (int j = first_art; j < n_cols; ++j) c1[static_cast<std::size_t>(j)] = -1.0;
        tab.set_objective(c1);
        const std::vector<bool> all(static_cast<std::size_t>(n_cols), true);
        const LpStatus s1 = tab.optimize(all, tol, max_iter);
        if (s1 == LpStatus::IterationLimit) {
            result.status = s1;
            return result;
        }
        double infeas = 0.0;
        for (int r = 0; r < m; ++r)
            if (tab.basis()[static_cast<std::size_t>(r)] >= first_art) infeas += tab.rhs(r);
        if (infeas > 1e3 * tol * (1.0 + m)) {
            result.status = LpStatus::Infeasible;
            return result;
        }
        // Drive zero-valued artificials out of the basis where possible; rows left behind are redundant.
        for (int r = 0; r < m; ++r) {
            if (tab.basis()[static_cast<std::size_t>(r)] < first_art) continue;
            for (int j = 0; j < first_art; ++j) {
                if (std::abs(tab.at(r, j)) > 1e-9) {
                    tab.pivot(r, j);
                    break;
                }
            }
        }
    }

    std::vector<double> c2(static_cast<std::size_t>(n_cols), 0.0);
    for (int j = 0; j < nv; ++j) {
        c2[static_cast<std::size_t>(j)] = lp.objective[static_cast<std::size_t>(j)];
        if (neg_col[static_cast<std::size_t>(j)] >= 0) c2[static_cast<std::size_t>(neg_col[static_cast<std::size_t>(j)])] = -lp.objective[static_cast<std::size_t>(j)];
    }
    tab.set_objective(c2);
    std::vector<bool> allowed(static_cast<std::size_t>(n_cols), true);
    for (int j = first_art; j < n_cols; ++j) allowed[static_cast<std::size_t>(j)] = false;
    result.status = tab.optimize(allowed, tol, max_iter);
    if (result.status != LpStatus::Optimal) return result;

    std::vector<double> full(static_cast<std::size_t>(n_cols), 0.0);
    for (int r = 0; r < m; ++r) full[static_cast<std::size_t>(tab.basis()[static_cast<std::size_t>(r)])] = tab.rhs(r);
    result.x.assign(static_cast<std::size_t>(nv), 0.0);
    for (int j = 0; j < nv; ++j) {
        double v = full[static_cast<std::size_t>(j)];
        if (neg_col[static_cast<std::size_t>(j)] >= 0) v -= full[static_cast<std::size_t>(neg_col[static_cast<std::size_t>(j)])];
        result.x[static_cast<std::size_t>(j)] = v;
    }
    result.objective = tab.cost(n_cols);
    return result;
}

}  // namespace graspctl
