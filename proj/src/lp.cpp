#include "speedscale/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace speedscale {

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::kOptimal: return "optimal";
        case LpStatus::kInfeasible: return "infeasible";
        case LpStatus::kUnbounded: return "unbounded";
        case LpStatus::kSolverFailure: return "solver_failure";
    }
    return "unknown";
}

int LinearProgram::add_variable(double cost, double lower_bound, std::string name) {
    objective.push_back(cost);
    lower.push_back(lower_bound);
    names.push_back(std::move(name));
    return num_vars() - 1;
}

int LinearProgram::add_row(std::vector<Term> terms, Relation relation, double rhs, std::string name) {
    rows.push_back(Row{std::move(terms), relation, rhs, std::move(name)});
    return static_cast<int>(rows.size()) - 1;
}

void LinearProgram::validate() const {
    if (lower.size() != objective.size() || names.size() != objective.size())
        throw std::invalid_argument("variable arrays have inconsistent sizes");
    for (std::size_t j = 0; j < objective.size(); ++j)
        if (!std::isfinite(objective[j]) || !std::isfinite(lower[j])) throw std::invalid_argument("non-finite variable data");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!std::isfinite(rows[i].rhs)) throw std::invalid_argument("non-finite right-hand side in row " + std::to_string(i));
        for (const auto& t : rows[i].terms) {
            if (t.var < 0 || t.var >= num_vars()) throw std::invalid_argument("row " + std::to_string(i) + " references unknown variable");
            if (!std::isfinite(t.coeff)) throw std::invalid_argument("non-finite coefficient in row " + std::to_string(i));
        }
    }
}

namespace {

constexpr double kPivotTol = 1e-9;

class Tableau {
public:
    Tableau(const LinearProgram& lp, const LpSolveOptions& options, bool bland_only)
        : lp_(lp), options_(options), bland_only_(bland_only) {
        m_ = static_cast<int>(lp.rows.size());
        n_ = lp.num_vars();
        sign_.assign(m_, 1.0);
        std::vector<double> rhs(m_);
        for (int i = 0; i < m_; ++i) {
            double b = lp.rows[i].rhs;
            for (const auto& t : lp.rows[i].terms) b -= t.coeff * lp.lower[t.var];
            rhs[i] = b;
            if (b < 0) sign_[i] = -1.0;
        }
        // Column layout: structural | one slack/surplus per inequality row | one artificial per >=/= row.
        slack_col_.assign(m_, -1);
        art_col_.assign(m_, -1);
        int col = n_;
        for (int i = 0; i < m_; ++i)
            if (lp.rows[i].relation != Relation::kEqual) slack_col_[i] = col++;
        art_begin_ = col;
        for (int i = 0; i < m_; ++i) {
            const Relation rel = effective_relation(i);
            if (rel != Relation::kLessEqual) art_col_[i] = col++;
        }
        cols_ = col;
        width_ = cols_ + 1;
        t_.assign(static_cast<std::size_t>(m_ + 1) * width_, 0.0);
        basis_.assign(m_, -1);
        for (int i = 0; i < m_; ++i) {
            for (const auto& term : lp.rows[i].terms) at(i, term.var) += sign_[i] * term.coeff;
            if (slack_col_[i] >= 0) at(i, slack_col_[i]) = sign_[i] * (lp.rows[i].relation == Relation::kLessEqual ? 1.0 : -1.0);
            if (art_col_[i] >= 0) {
                at(i, art_col_[i]) = 1.0;
                basis_[i] = art_col_[i];
            } else {
                basis_[i] = slack_col_[i];
            }
            at(i, cols_) = sign_[i] * rhs[i];
        }
    }

    LpSolution run() {
        LpSolution sol;
        sol.tolerances = options_.tolerances;
        // Phase 1.
        std::vector<double> cost(cols_, 0.0);
        bool any_art = false;
        for (int i = 0; i < m_; ++i)
            if (art_col_[i] >= 0) {
                cost[art_col_[i]] = 1.0;
                any_art = true;
            }
        if (any_art) {
            set_costs(cost);
            const auto st = iterate(/*allow_artificial=*/true);
            if (st == IterResult::kLimit) return failure(sol, "iteration limit in phase 1");
            double scale = 1.0;
            for (int i = 0; i < m_; ++i) scale = std::max(scale, std::fabs(at(i, cols_)));
            if (-at(m_, cols_) > options_.tolerances.feasibility * scale) {
                sol.status = LpStatus::kInfeasible;
                sol.iterations = iterations_;
                sol.message = "phase 1 optimum is positive";
                return sol;
            }
            drive_out_artificials();
        }
        // Phase 2.
        std::fill(cost.begin(), cost.end(), 0.0);
        for (int j = 0; j < n_; ++j) cost[j] = lp_.objective[j];
        set_costs(cost);
        const auto st = iterate(/*allow_artificial=*/false);
        sol.iterations = iterations_;
        if (st == IterResult::kUnbounded) {
            sol.status = LpStatus::kUnbounded;
            sol.message = "objective unbounded below";
            return sol;
        }
        if (st == IterResult::kLimit) return failure(sol, "iteration limit in phase 2");
        extract(sol);
        return sol;
    }

private:
    enum class IterResult { kOptimal, kUnbounded, kLimit };

    double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * width_ + j]; }
    [[nodiscard]] double at(int i, int j) const { return t_[static_cast<std::size_t>(i) * width_ + j]; }

    [[nodiscard]] Relation effective_relation(int i) const {
        const Relation rel = lp_.rows[i].relation;
        if (sign_[i] > 0 || rel == Relation::kEqual) return rel;
        return rel == Relation::kLessEqual ? Relation::kGreaterEqual : Relation::kLessEqual;
    }

    [[nodiscard]] bool is_artificial(int col) const { return col >= art_begin_; }

    void set_costs(const std::vector<double>& cost) {
        cost_ = cost;
        for (int j = 0; j <= cols_; ++j) at(m_, j) = j < cols_ ? cost[j] : 0.0;
        for (int i = 0; i < m_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            for (int j = 0; j <= cols_; ++j) at(m_, j) -= cb * at(i, j);
        }
    }

    void pivot(int r, int c) {
        const double p = at(r, c);
        double* row = &t_[static_cast<std::size_t>(r) * width_];
        for (int j = 0; j <= cols_; ++j) row[j] /= p;
        row[c] = 1.0;
        for (int i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* other = &t_[static_cast<std::size_t>(i) * width_];
            const double f = other[c];
            if (f == 0.0) continue;
            for (int j = 0; j <= cols_; ++j) {
                if (row[j] == 0.0) continue;
                other[j] -= f * row[j];
                if (std::fabs(other[j]) < 1e-14) other[j] = 0.0;
            }
            other[c] = 0.0;
        }
        basis_[r] = c;
        ++iterations_;
    }

    IterResult iterate(bool allow_artificial) {
        const double tol = options_.tolerances.optimality * 1e-2;
        int degenerate = 0;
        while (true) {
            if (iterations_ >= options_.max_iterations) return IterResult::kLimit;
            const bool bland = bland_only_ || degenerate >= options_.degenerate_limit;
            int enter = -1;
            double best = -tol;
            for (int j = 0; j < cols_; ++j) {
                if (!allow_artificial && is_artificial(j)) continue;
                const double d = at(m_, j);
                if (d < best) {
                    enter = j;
                    if (bland) break;
                    best = d;
                }
            }
            if (enter < 0) return IterResult::kOptimal;
            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            double best_piv = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = std::max(0.0, at(i, cols_)) / a;
                if (leave < 0 || ratio < best_ratio - 1e-12) {
                    leave = i;
                    best_ratio = ratio;
                    best_piv = a;
                } else if (ratio <= best_ratio + 1e-12) {
                    const bool take = bland ? basis_[i] < basis_[leave] : a > best_piv;
                    if (take) {
                        leave = i;
                        best_ratio = std::min(best_ratio, ratio);
                        best_piv = a;
                    }
                }
            }
            if (leave < 0) return IterResult::kUnbounded;
            degenerate = best_ratio <= 1e-12 ? degenerate + 1 : 0;
            pivot(leave, enter);
        }
    }

    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (!is_artificial(basis_[i])) continue;
            int best = -1;
            double mag = kPivotTol;
            for (int j = 0; j < art_begin_; ++j)
                if (std::fabs(at(i, j)) > mag) {
                    mag = std::fabs(at(i, j));
                    best = j;
                }
            if (best >= 0) pivot(i, best);
        }
    }

    LpSolution& failure(LpSolution& sol, const std::string& why) {
        sol.status = LpStatus::kSolverFailure;
        sol.iterations = iterations_;
        sol.message = why;
        return sol;
    }

    void extract(LpSolution& sol) {
        sol.values.assign(n_, 0.0);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_) sol.values[basis_[i]] = std::max(0.0, at(i, cols_));
        for (int j = 0; j < n_; ++j) sol.values[j] += lp_.lower[j];
        sol.duals.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) {
            const int col = art_col_[i] >= 0 ? art_col_[i] : slack_col_[i];
            double y = -at(m_, col);
            // A surplus column holds -e_i, so its reduced cost is +y.
            if (art_col_[i] < 0 && effective_relation(i) != Relation::kLessEqual) y = at(m_, col);
            sol.duals[i] = sign_[i] * y;
        }
        certify(sol);
    }

    void certify(LpSolution& sol) { certify_solution(lp_, sol, options_.tolerances); }

    const LinearProgram& lp_;
    const LpSolveOptions& options_;
    bool bland_only_;
    int m_ = 0, n_ = 0, cols_ = 0, width_ = 0, art_begin_ = 0;
    std::vector<double> sign_;
    std::vector<int> slack_col_, art_col_, basis_;
    std::vector<double> t_, cost_;
    int iterations_ = 0;
};

}  // namespace

void certify_solution(const LinearProgram& lp, LpSolution& sol, const LpTolerances& tol) {
    const int n = lp.num_vars();
    sol.tolerances = tol;
    if (static_cast<int>(sol.values.size()) != n || sol.duals.size() != lp.rows.size()) {
        sol.status = LpStatus::kSolverFailure;
        sol.message = "certificate check failed: solution has the wrong shape";
        return;
    }
    sol.reduced_costs.assign(lp.objective.begin(), lp.objective.end());
    double primal = 0.0;
    for (int j = 0; j < n; ++j) primal += lp.objective[j] * sol.values[j];
    double dual = 0.0;
    std::ostringstream why;
    for (int j = 0; j < n; ++j)
        if (sol.values[j] < lp.lower[j] - tol.feasibility * std::max(1.0, std::fabs(lp.lower[j])))
            why << "x" << j << " below its lower bound; ";
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        const auto& row = lp.rows[i];
        double act = 0.0;
        for (const auto& t : row.terms) {
            act += t.coeff * sol.values[t.var];
            sol.reduced_costs[t.var] -= t.coeff * sol.duals[i];
        }
        const double slack_tol = tol.feasibility * std::max(1.0, std::fabs(row.rhs));
        const bool ok = row.relation == Relation::kLessEqual      ? act <= row.rhs + slack_tol
                        : row.relation == Relation::kGreaterEqual ? act >= row.rhs - slack_tol
                                                                  : std::fabs(act - row.rhs) <= slack_tol;
        if (!ok) why << "row " << i << " violated by " << std::fabs(act - row.rhs) << "; ";
        const double y = sol.duals[i];
        if ((row.relation == Relation::kLessEqual && y > tol.optimality) || (row.relation == Relation::kGreaterEqual && y < -tol.optimality))
            why << "dual of row " << i << " has the wrong sign; ";
        dual += y * row.rhs;
    }
    for (int j = 0; j < n; ++j) {
        if (sol.reduced_costs[j] < -tol.optimality * std::max(1.0, std::fabs(lp.objective[j])))
            why << "reduced cost of x" << j << " is " << sol.reduced_costs[j] << "; ";
        dual += lp.lower[j] * sol.reduced_costs[j];
    }
    if (std::fabs(primal - dual) > tol.optimality * std::max(1.0, std::fabs(primal))) why << "duality gap " << std::fabs(primal - dual) << "; ";
    sol.objective = primal;
    sol.dual_objective = dual;
    const std::string msg = why.str();
    if (msg.empty()) {
        sol.status = LpStatus::kOptimal;
        sol.message.clear();
    } else {
        sol.status = LpStatus::kSolverFailure;
        sol.message = "certificate check failed: " + msg;
    }
}

LpSolution solve_lp(const LinearProgram& lp, const LpSolveOptions& options) {
    lp.validate();
    LpSolution sol = Tableau(lp, options, false).run();
    if (sol.status != LpStatus::kSolverFailure) return sol;
    // Bland's rule from the start: slower but immune to the stalling that can precede a failed certificate.
    LpSolution retry = Tableau(lp, options, true).run();
    if (retry.status == LpStatus::kSolverFailure) retry.message = sol.message + " | retry: " + retry.message;
    return retry;
}

// ------------------------------------------------------- IncrementalSimplex

struct IncrementalSimplex::State {
    LinearProgram lp;
    std::vector<std::vector<double>> rows;  // tableau rows over all columns
    std::vector<double> rhs;                // basic values
    std::vector<double> d;                  // reduced costs
    std::vector<int> basis;                 // basic column per row
    std::vector<int> slack;                 // slack column per row
    std::vector<double> row_sign;           // +1 for stored <= rows, -1 for negated >= rows
    std::vector<int> user_col;              // tableau column of each user column
    std::vector<char> is_slack;
    std::vector<int> nz;  // scratch: nonzero positions of the pivot row
    bool solved = false;

    [[nodiscard]] int width() const { return static_cast<int>(d.size()); }

    void pivot(int r, int c) {
        auto& pr = rows[r];
        const double p = pr[c];
        for (double& v : pr) v /= p;
        rhs[r] /= p;
        pr[c] = 1.0;
        nz.clear();
        for (int j = 0; j < width(); ++j)
            if (pr[j] != 0.0 && j != c) nz.push_back(j);
        for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
            if (i == r) continue;
            auto& other = rows[i];
            const double f = other[c];
            if (f == 0.0) continue;
            for (int j : nz) {
                double v = other[j] - f * pr[j];
                other[j] = std::fabs(v) < 1e-14 ? 0.0 : v;
            }
            other[c] = 0.0;
            rhs[i] -= f * rhs[r];
        }
        const double f = d[c];
        if (f != 0.0) {
            for (int j : nz) d[j] -= f * pr[j];
            d[c] = 0.0;
        }
        basis[r] = c;
    }
    LpStatus run(int max_iterations, int& used) {
        constexpr double kFeas = 1e-10;
        constexpr double kOpt = 1e-10;
        int degenerate = 0;
        for (int it = 0; it < max_iterations; ++it, ++used) {
            int leave = -1;
            double worst = -kFeas;
            for (std::size_t i = 0; i < rows.size(); ++i)
                if (rhs[i] < worst) {
                    worst = rhs[i];
                    leave = static_cast<int>(i);
                }
            if (leave >= 0) {
                // Dual simplex step.
                int enter = -1;
                double best = std::numeric_limits<double>::infinity();
                double best_mag = 0.0;
                const auto& row = rows[leave];
                for (int j = 0; j < width(); ++j) {
                    if (row[j] >= -kPivotTol) continue;
                    const double ratio = std::max(0.0, d[j]) / -row[j];
                    if (ratio < best - 1e-12 || (ratio <= best + 1e-12 && -row[j] > best_mag)) {
                        best = std::min(best, ratio);
                        best_mag = -row[j];
                        enter = j;
                    }
                }
                if (enter < 0) return LpStatus::kInfeasible;
                pivot(leave, enter);
                continue;
            }
            const bool bland = degenerate >= 30;
            int enter = -1;
            double best = -kOpt;
            for (int j = 0; j < width(); ++j)
                if (d[j] < best) {
                    enter = j;
                    if (bland) break;
                    best = d[j];
                }
            if (enter < 0) {
                solved = true;
                return LpStatus::kOptimal;
            }
            int out = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            double best_piv = 0.0;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const double a = rows[i][enter];
                if (a <= kPivotTol) continue;
                const double ratio = std::max(0.0, rhs[i]) / a;
                if (out < 0 || ratio < best_ratio - 1e-12) {
                    out = static_cast<int>(i);
                    best_ratio = ratio;
                    best_piv = a;
                } else if (ratio <= best_ratio + 1e-12 && (bland ? basis[i] < basis[out] : a > best_piv)) {
                    out = static_cast<int>(i);
                    best_ratio = std::min(best_ratio, ratio);
                    best_piv = a;
                }
            }
            if (out < 0) return LpStatus::kUnbounded;
            degenerate = best_ratio <= 1e-12 ? degenerate + 1 : 0;
            pivot(out, enter);
        }
        return LpStatus::kSolverFailure;
    }
};

IncrementalSimplex::IncrementalSimplex() : state_(std::make_unique<State>()) {}
IncrementalSimplex::~IncrementalSimplex() = default;

const LinearProgram& IncrementalSimplex::program() const { return state_->lp; }

int IncrementalSimplex::add_column(double cost, const std::vector<std::pair<int, double>>& entries) {
    State& s = *state_;
    if (!std::isfinite(cost)) throw std::invalid_argument("non-finite column cost");
    if (!s.solved && cost < 0) throw std::invalid_argument("negative cost before the first solve");
    const int user = s.lp.add_variable(cost);
    double d = cost;
    std::vector<double> col(s.rows.size(), 0.0);
    for (const auto& [r, coeff] : entries) {
        if (r < 0 || r >= static_cast<int>(s.rows.size())) throw std::invalid_argument("column references unknown row");
        if (coeff == 0.0) continue;
        s.lp.rows[r].terms.push_back({user, coeff});
        const double a = s.row_sign[r] * coeff;
        d += s.d[s.slack[r]] * a;
        for (std::size_t i = 0; i < s.rows.size(); ++i) col[i] += s.rows[i][s.slack[r]] * a;
    }
    for (std::size_t i = 0; i < s.rows.size(); ++i) s.rows[i].push_back(col[i]);
    s.d.push_back(d);
    s.is_slack.push_back(0);
    s.user_col.push_back(s.width() - 1);
    return user;
}

int IncrementalSimplex::add_row(const std::vector<std::pair<int, double>>& entries, Relation relation, double rhs) {
    State& s = *state_;
    if (relation == Relation::kEqual) throw std::invalid_argument("incremental rows must be inequalities");
    if (!std::isfinite(rhs)) throw std::invalid_argument("non-finite right-hand side");
    const double sign = relation == Relation::kLessEqual ? 1.0 : -1.0;
    std::vector<LinearProgram::Term> terms;
    std::vector<double> r(s.width() + 1, 0.0);
    for (const auto& [c, coeff] : entries) {
        if (c < 0 || c >= static_cast<int>(s.user_col.size())) throw std::invalid_argument("row references unknown column");
        if (coeff == 0.0) continue;
        terms.push_back({c, coeff});
        r[s.user_col[c]] += sign * coeff;
    }
    double b = sign * rhs;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        const double f = r[s.basis[i]];
        if (f == 0.0) continue;
        for (int j = 0; j < s.width(); ++j)
            if (s.rows[i][j] != 0.0) r[j] -= f * s.rows[i][j];
        r[s.basis[i]] = 0.0;
        b -= f * s.rhs[i];
    }
    for (auto& row : s.rows) row.push_back(0.0);
    r[s.width()] = 1.0;
    s.rows.push_back(std::move(r));
    s.rhs.push_back(b);
    s.d.push_back(0.0);
    s.is_slack.push_back(1);
    s.basis.push_back(s.width() - 1);
    s.slack.push_back(s.width() - 1);
    s.row_sign.push_back(sign);
    s.lp.add_row(std::move(terms), relation, rhs);
    return static_cast<int>(s.rows.size()) - 1;
}

namespace {

// Basic values B^{-1} b for right-hand sides `b` given in stored (sign-adjusted) form.
void recompute_basic_values(IncrementalSimplex::State& s, const std::vector<double>& b);

}  // namespace

LpStatus IncrementalSimplex::solve(int max_iterations) {
    State& s = *state_;
    // Degenerate bases are the norm for generation masters (many tight unit rows),
    // so iterate on slightly relaxed right-hand sides and restore them afterwards.
    std::vector<double> b(s.rows.size()), relaxed(s.rows.size());
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
        b[k] = s.row_sign[k] * s.lp.rows[k].rhs;
        const double jitter = 1.0 + static_cast<double>((k * 2654435761u) % 1024u) / 1024.0;
        relaxed[k] = b[k] + 1e-7 * jitter * std::max(1.0, std::fabs(b[k]));
    }
    recompute_basic_values(s, relaxed);
    int used = 0;
    LpStatus status = s.run(max_iterations, used);
    recompute_basic_values(s, b);
    if (status != LpStatus::kOptimal) return status;
    return s.run(max_iterations - used, used);
}

std::vector<double> IncrementalSimplex::values() const {
    const State& s = *state_;
    std::vector<double> x(s.user_col.size(), 0.0);
    std::vector<int> user_of(s.width(), -1);
    for (std::size_t k = 0; k < s.user_col.size(); ++k) user_of[s.user_col[k]] = static_cast<int>(k);
    for (std::size_t i = 0; i < s.rows.size(); ++i)
        if (const int u = user_of[s.basis[i]]; u >= 0) x[u] = std::max(0.0, s.rhs[i]);
    return x;
}

double IncrementalSimplex::row_slack(int row) const {
    const State& s = *state_;
    const int col = s.slack.at(row);
    for (std::size_t i = 0; i < s.rows.size(); ++i)
        if (s.basis[i] == col) return s.rhs[i];
    return 0.0;
}

bool IncrementalSimplex::column_basic(int column) const {
    const State& s = *state_;
    const int col = s.user_col.at(column);
    return std::find(s.basis.begin(), s.basis.end(), col) != s.basis.end();
}

double IncrementalSimplex::reduced_cost(int column) const { return state_->d[state_->user_col.at(column)]; }

namespace {

void recompute_basic_values(IncrementalSimplex::State& s, const std::vector<double>& b) {
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        double v = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) v += s.rows[i][s.slack[k]] * b[k];
        s.rhs[i] = v;
    }
}

void compact_columns(IncrementalSimplex::State& s, const std::vector<char>& drop_col) {
    std::vector<int> new_index(s.width(), -1);
    int next = 0;
    for (int j = 0; j < s.width(); ++j)
        if (!drop_col[j]) new_index[j] = next++;
    for (auto& row : s.rows) {
        int w = 0;
        for (int j = 0; j < static_cast<int>(row.size()); ++j)
            if (!drop_col[j]) row[w++] = row[j];
        row.resize(w);
    }
    int w = 0;
    for (int j = 0; j < static_cast<int>(s.d.size()); ++j)
        if (!drop_col[j]) {
            s.d[w] = s.d[j];
            s.is_slack[w] = s.is_slack[j];
            ++w;
        }
    s.d.resize(w);
    s.is_slack.resize(w);
    for (int& b : s.basis) b = new_index[b];
    for (int& c : s.slack) c = new_index[c];
    for (int& c : s.user_col) c = new_index[c];
}

}  // namespace

void IncrementalSimplex::remove_rows(std::vector<int> rows) {
    State& s = *state_;
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::vector<char> drop_col(s.width(), 0);
    std::vector<char> drop_tab_row(s.rows.size(), 0);
    std::vector<char> drop_row(s.slack.size(), 0);
    for (int k : rows) {
        const int col = s.slack.at(k);
        const auto it = std::find(s.basis.begin(), s.basis.end(), col);
        if (it == s.basis.end()) throw std::logic_error("cannot remove a row whose slack is nonbasic");
        drop_tab_row[it - s.basis.begin()] = 1;
        drop_col[col] = 1;
        drop_row[k] = 1;
    }
    auto keep_if = [](auto& vec, const std::vector<char>& drop) {
        std::size_t w = 0;
        for (std::size_t i = 0; i < vec.size(); ++i)
            if (!drop[i]) {
                if (w != i) vec[w] = std::move(vec[i]);
                ++w;
            }
        vec.resize(w);
    };
    keep_if(s.rows, drop_tab_row);
    keep_if(s.rhs, drop_tab_row);
    keep_if(s.basis, drop_tab_row);
    keep_if(s.slack, drop_row);
    keep_if(s.row_sign, drop_row);
    keep_if(s.lp.rows, drop_row);
    compact_columns(s, drop_col);
}

void IncrementalSimplex::remove_columns(std::vector<int> columns) {
    State& s = *state_;
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
    std::vector<char> drop_col(s.width(), 0);
    std::vector<int> new_user(s.user_col.size(), -1);
    std::vector<char> drop_user(s.user_col.size(), 0);
    for (int c : columns) {
        if (column_basic(c)) throw std::logic_error("cannot remove a basic column");
        drop_col[s.user_col.at(c)] = 1;
        drop_user[c] = 1;
    }
    int next = 0;
    for (std::size_t c = 0; c < s.user_col.size(); ++c)
        if (!drop_user[c]) new_user[c] = next++;
    for (auto& row : s.lp.rows) {
        std::size_t w = 0;
        for (auto& t : row.terms)
            if (new_user[t.var] >= 0) row.terms[w++] = {new_user[t.var], t.coeff};
        row.terms.resize(w);
    }
    std::size_t w = 0;
    for (std::size_t c = 0; c < s.user_col.size(); ++c)
        if (!drop_user[c]) {
            s.lp.objective[w] = s.lp.objective[c];
            s.lp.lower[w] = s.lp.lower[c];
            s.lp.names[w] = s.lp.names[c];
            s.user_col[w] = s.user_col[c];
            ++w;
        }
    s.lp.objective.resize(w);
    s.lp.lower.resize(w);
    s.lp.names.resize(w);
    s.user_col.resize(w);
    compact_columns(s, drop_col);
}

std::vector<double> IncrementalSimplex::duals() const {
    const State& s = *state_;
    std::vector<double> y(s.rows.size());
    for (std::size_t i = 0; i < s.rows.size(); ++i) y[i] = s.row_sign[i] * -s.d[s.slack[i]];
    return y;
}

std::string to_lp_format(const LinearProgram& lp) {
    std::ostringstream os;
    os << std::setprecision(17);
    auto name = [&](int j) { return lp.names[j].empty() ? "x" + std::to_string(j) : lp.names[j]; };
    auto write_terms = [&](const std::vector<std::pair<int, double>>& terms) {
        if (terms.empty()) {
            os << " 0 " << name(0);
            return;
        }
        for (const auto& [j, c] : terms) os << (c < 0 ? " - " : " + ") << std::fabs(c) << ' ' << name(j);
    };
    os << "Minimize\n obj:";
    std::vector<std::pair<int, double>> obj;
    for (int j = 0; j < lp.num_vars(); ++j)
        if (lp.objective[j] != 0.0) obj.emplace_back(j, lp.objective[j]);
    if (obj.empty() && lp.num_vars() > 0) obj.emplace_back(0, 0.0);
    write_terms(obj);
    os << "\nSubject To\n";
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        const auto& row = lp.rows[i];
        os << ' ' << (row.name.empty() ? "c" + std::to_string(i) : row.name) << ':';
        std::vector<std::pair<int, double>> terms;
        for (const auto& t : row.terms) terms.emplace_back(t.var, t.coeff);
        write_terms(terms);
        os << (row.relation == Relation::kLessEqual ? " <= " : row.relation == Relation::kGreaterEqual ? " >= " : " = ") << row.rhs << '\n';
    }
    os << "Bounds\n";
    for (int j = 0; j < lp.num_vars(); ++j) os << ' ' << name(j) << " >= " << lp.lower[j] << '\n';
    os << "End\n";
    return os.str();
}

}  // namespace speedscale
