#pragma once

#include <memory>
#include <string>
#include <vector>

namespace speedscale {

enum class Relation { kLessEqual, kGreaterEqual, kEqual };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kSolverFailure };

std::string to_string(LpStatus status);

struct LpTolerances {
    double feasibility = 1e-7;
    double optimality = 1e-7;
};

/// Minimization problem over variables x >= lower.
struct LinearProgram {
    struct Term {
        int var = 0;
        double coeff = 0.0;
    };
    struct Row {
        std::vector<Term> terms;
        Relation relation = Relation::kLessEqual;
        double rhs = 0.0;
        std::string name;
    };

    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<std::string> names;
    std::vector<Row> rows;

    [[nodiscard]] int num_vars() const { return static_cast<int>(objective.size()); }
    int add_variable(double cost, double lower_bound = 0.0, std::string name = {});
    int add_row(std::vector<Term> terms, Relation relation, double rhs, std::string name = {});
    /// Throws std::invalid_argument on out-of-range indices or non-finite data.
    void validate() const;
};

struct LpSolution {
    LpStatus status = LpStatus::kSolverFailure;
    std::vector<double> values;
    double objective = 0.0;
    /// One multiplier per row; >= 0 on >= rows and <= 0 on <= rows.
    std::vector<double> duals;
    /// c_j - A_j^T y per variable.
    std::vector<double> reduced_costs;
    double dual_objective = 0.0;
    LpTolerances tolerances;
    int iterations = 0;
    std::string message;
};

struct LpSolveOptions {
    LpTolerances tolerances;
    int max_iterations = 200000;
    /// Consecutive degenerate pivots after which entering columns are chosen by Bland's rule.
    int degenerate_limit = 30;
};

/// Two-phase dense tableau simplex. An optimal status is only returned after
/// primal feasibility, dual feasibility and zero duality gap are re-checked
/// against the original data; otherwise the status is kSolverFailure.
LpSolution solve_lp(const LinearProgram& lp, const LpSolveOptions& options = {});

/// Re-checks a claimed optimum against the original data: row feasibility,
/// dual signs, reduced costs and the duality gap. Sets status to kOptimal or
/// kSolverFailure (with the reasons in `message`), and fills objective,
/// dual_objective and reduced_costs.
void certify_solution(const LinearProgram& lp, LpSolution& solution, const LpTolerances& tolerances = {});

/// Warm-started simplex for row and column generation. Rows are <= or >=
/// inequalities; columns and rows may be appended between solves. New columns
/// are handled by primal simplex and new rows by dual simplex, starting from
/// the previous optimal basis.
class IncrementalSimplex {
public:
    IncrementalSimplex();
    ~IncrementalSimplex();
    IncrementalSimplex(const IncrementalSimplex&) = delete;
    IncrementalSimplex& operator=(const IncrementalSimplex&) = delete;

    /// `entries` are (row, coefficient) pairs over existing rows. Costs must be >= 0
    /// while no solve has happened yet.
    int add_column(double cost, const std::vector<std::pair<int, double>>& entries);
    /// `entries` are (column, coefficient) pairs over existing columns.
    int add_row(const std::vector<std::pair<int, double>>& entries, Relation relation, double rhs);
    LpStatus solve(int max_iterations = 200000);

    [[nodiscard]] std::vector<double> values() const;
    [[nodiscard]] std::vector<double> duals() const;
    /// Slack of row k in the current basis (0 when the slack is nonbasic).
    [[nodiscard]] double row_slack(int row) const;
    [[nodiscard]] bool column_basic(int column) const;
    [[nodiscard]] double reduced_cost(int column) const;
    /// Drops rows whose slack is basic; later rows shift down. Throws if a slack is nonbasic.
    void remove_rows(std::vector<int> rows);
    /// Drops nonbasic columns; later columns shift down. Throws if a column is basic.
    void remove_columns(std::vector<int> columns);
    /// The original data, for certify_solution.
    [[nodiscard]] const LinearProgram& program() const;

    struct State;

private:
    std::unique_ptr<State> state_;
};

/// CPLEX LP text format, for cross-checking with external solvers.
std::string to_lp_format(const LinearProgram& lp);

}  // namespace speedscale
