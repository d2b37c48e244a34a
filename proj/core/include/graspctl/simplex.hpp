#pragma once

#include <vector>

namespace graspctl {

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct LpRow {
    std::vector<double> a;
    RowSense sense = RowSense::LessEqual;
    double b = 0.0;
};

// maximize c.x subject to rows; variables are >= 0 unless flagged free.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<bool> free_variable;
    std::vector<LpRow> rows;

    explicit LinearProgram(int n_vars = 0)
        : objective(static_cast<std::size_t>(n_vars), 0.0), free_variable(static_cast<std::size_t>(n_vars), false) {}

    int num_vars() const { return static_cast<int>(objective.size()); }
    void add_row(std::vector<double> a, RowSense sense, double b) { rows.push_back({std::move(a), sense, b}); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

// Dense two-phase tableau simplex with Bland's rule. Intended for a few dozen rows/columns.
LpResult solve_lp(const LinearProgram& lp, double tol = 1e-10);

}  // namespace graspctl
