#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "speedscale/discretize.hpp"
#include "speedscale/instance.hpp"
#include "speedscale/lp.hpp"

namespace speedscale {

/// Sparse fractional assignment (job id, execution interval) -> value.
struct FractionalSolution {
    double alpha = 2.0;
    std::map<std::pair<int, Interval>, double> values;

    void add(int job, const Interval& interval, double value);
    /// Total mass per job id.
    [[nodiscard]] std::map<int, double> mass_per_job() const;
};

/// Sum over the support of value * w_j^alpha / |I|^(alpha-1).
double fractional_energy(const FractionalSolution& x, const Instance& instance);

struct Lp1Variable {
    int job_index = 0;
    std::size_t start = 0;  ///< grid index
    std::size_t end = 0;    ///< grid index
};

/// The interval-indexed relaxation over a landmark grid. The explicit
/// LinearProgram is only built when `materialize` is requested.
struct Lp1Model {
    Instance instance;
    LandmarkGrid grid;
    bool include_constraint_3 = true;
    std::optional<LinearProgram> lp;
    std::vector<Lp1Variable> variables;
    /// Objective multiplier: LP costs are the energies divided by this scale.
    double cost_scale = 1.0;
    std::size_t pruned_rows = 0;

    [[nodiscard]] std::size_t variable_count() const;
    [[nodiscard]] double cost(const Lp1Variable& v) const;
};

struct Lp1BuildOptions {
    bool materialize = false;
    /// Materialization refuses models with more variables than this.
    std::size_t max_variables = 20000;
    /// Redundant-row pruning is quadratic in the row count and is skipped above this.
    std::size_t max_rows_for_pruning = 20000;
};

/// Throws std::domain_error unless the instance has one processor.
Lp1Model build_lp1(const Instance& instance, const LandmarkGrid& grid, bool include_constraint_3, const Lp1BuildOptions& options = {});

enum class Lp1Method { kAuto, kGeneration, kFull };

struct Lp1Result {
    FractionalSolution solution;
    LpStatus status = LpStatus::kSolverFailure;
    double value = 0.0;
    std::size_t columns = 0;
    std::size_t rows = 0;
    std::size_t nonzeros = 0;
    int rounds = 0;
    std::string method;
};

struct Lp1SolveOptions {
    Lp1Method method = Lp1Method::kAuto;
    int max_rounds = 5000;
    std::size_t columns_per_job = 6;
    std::size_t rows_per_round = 30;
};

/// Solves the relaxation. Throws InfeasibleError naming the grid when no
/// fractional solution exists, and std::runtime_error on solver failure.
Lp1Result solve_lp1(const Lp1Model& model, const Lp1SolveOptions& options = {});

struct ConstraintReport {
    double max_assignment_deficit = 0.0;  ///< max_j (1 - sum_I x_{I,j})
    double max_point_load = 0.0;          ///< max_t sum_{t in int I} x
    double max_overlap_sum = 0.0;         ///< max over (I, j) of the non-preemption row
    std::string worst_overlap_row;
    [[nodiscard]] bool ok(double tol, bool with_constraint_3) const;
};

/// Evaluates the relaxation's constraints on an arbitrary solution. Point loads
/// are taken over all times; the non-preemption rows range over every interval
/// whose endpoints are support endpoints or midpoints between them.
ConstraintReport check_lp1_constraints(const FractionalSolution& x, const Instance& instance, bool with_constraint_3);

/// Non-preemption row value for interval I and job `job` (id).
double overlap_row_value(const FractionalSolution& x, const Interval& I, int job);

}  // namespace speedscale
