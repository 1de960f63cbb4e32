#include "speedscale/lp1.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "speedscale/errors.hpp"

namespace speedscale {

void FractionalSolution::add(int job, const Interval& interval, double value) {
    if (value == 0.0) return;
    values[{job, interval}] += value;
}

std::map<int, double> FractionalSolution::mass_per_job() const {
    std::map<int, double> m;
    for (const auto& [key, v] : values) m[key.first] += v;
    return m;
}

double fractional_energy(const FractionalSolution& x, const Instance& instance) {
    double total = 0.0;
    for (const auto& [key, v] : x.values) {
        const Job& job = instance.jobs[instance.index_of(key.first)];
        total += v * energy_of_job(job.work, key.second.length(), x.alpha);
    }
    return total;
}

std::size_t Lp1Model::variable_count() const {
    if (!variables.empty()) return variables.size();
    std::size_t count = 0;
    for (const auto& job : instance.jobs)
        if (auto r = index_range(grid, job.life())) {
            const std::size_t k = r->second - r->first + 1;
            count += k * (k - 1) / 2;
        }
    return count;
}

double Lp1Model::cost(const Lp1Variable& v) const {
    const Job& job = instance.jobs[v.job_index];
    const Rational len = grid.points[v.end] - grid.points[v.start];
    return energy_of_job(job.work, len, instance.alpha) / cost_scale;
}

namespace {

struct Grid {
    std::vector<double> t;
    std::vector<std::pair<std::size_t, std::size_t>> range;  // per job
};

Grid grid_view(const Lp1Model& model) {
    Grid g;
    for (const auto& p : model.grid.points) g.t.push_back(p.to_double());
    for (const auto& job : model.instance.jobs) {
        auto r = index_range(model.grid, job.life());
        if (!r || model.grid.points[r->first] != job.release || model.grid.points[r->second] != job.deadline)
            throw std::invalid_argument("grid does not contain the endpoints of job " + std::to_string(job.id));
        g.range.push_back(*r);
    }
    return g;
}

double cost_scale_of(const Instance& inst) {
    double s = 0.0;
    for (const auto& j : inst.jobs) s += energy_of_job(j.work, j.life().length(), inst.alpha);
    return s > 0 ? s : 1.0;
}

bool overlap_coeff(const Lp1Variable& v, std::size_t A, std::size_t B, int row_job) {
    if (v.job_index == row_job) return v.start < B && A < v.end;
    return v.start <= A && B <= v.end;
}

FractionalSolution to_solution(const Lp1Model& model, const std::vector<Lp1Variable>& cols, const std::vector<double>& x) {
    FractionalSolution sol;
    sol.alpha = model.instance.alpha;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (x[k] <= 1e-12) continue;
        const auto& v = cols[k];
        sol.add(model.instance.jobs[v.job_index].id, {model.grid.points[v.start], model.grid.points[v.end]}, x[k]);
    }
    return sol;
}

std::string grid_name(const LandmarkGrid& grid) {
    std::ostringstream os;
    os << "landmark grid with " << grid.size() << " points";
    if (grid.epsilon > 0) os << " (epsilon=" << grid.epsilon << ")";
    os << ", " << grid.inserted_per_gap << " inserted per gap";
    return os.str();
}

// Rows of the full model as sorted variable-index lists (all coefficients 1).
struct RowSet {
    std::vector<std::vector<int>> le;  // <= 1 rows
};

void prune(RowSet& rows, std::size_t& pruned, std::size_t limit) {
    auto& r = rows.le;
    const std::size_t before = r.size();
    r.erase(std::remove_if(r.begin(), r.end(), [](const auto& v) { return v.empty(); }), r.end());
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    if (r.size() <= limit) {
        // A row whose support is a subset of another row's support is implied by it.
        std::vector<std::size_t> order(r.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a].size() > r[b].size(); });
        std::vector<bool> dead(r.size(), false);
        for (std::size_t x = 0; x < order.size(); ++x) {
            const auto& big = r[order[x]];
            if (dead[order[x]]) continue;
            for (std::size_t y = x + 1; y < order.size(); ++y) {
                if (dead[order[y]]) continue;
                const auto& small = r[order[y]];
                if (std::includes(big.begin(), big.end(), small.begin(), small.end())) dead[order[y]] = true;
            }
        }
        std::vector<std::vector<int>> kept;
        for (std::size_t i = 0; i < r.size(); ++i)
            if (!dead[i]) kept.push_back(std::move(r[i]));
        r = std::move(kept);
    }
    pruned = before - r.size();
}

}  // namespace

Lp1Model build_lp1(const Instance& instance, const LandmarkGrid& grid, bool include_constraint_3, const Lp1BuildOptions& options) {
    instance.validate();
    if (instance.processors != 1) throw std::domain_error("the interval relaxation is defined for one processor");
    Lp1Model model;
    model.instance = instance;
    model.grid = grid;
    model.include_constraint_3 = include_constraint_3;
    model.cost_scale = cost_scale_of(instance);
    const Grid g = grid_view(model);
    if (!options.materialize) return model;

    if (model.variable_count() > options.max_variables)
        throw SizeLimitError("relaxation has " + std::to_string(model.variable_count()) + " variables, above the materialization cap");
    const int n = static_cast<int>(instance.jobs.size());
    for (int j = 0; j < n; ++j)
        for (std::size_t a = g.range[j].first; a < g.range[j].second; ++a)
            for (std::size_t b = a + 1; b <= g.range[j].second; ++b) model.variables.push_back({j, a, b});

    LinearProgram lp;
    for (const auto& v : model.variables) {
        const Job& job = instance.jobs[v.job_index];
        lp.add_variable(model.cost(v), 0.0,
                        "x_j" + std::to_string(job.id) + "_" + std::to_string(v.start) + "_" + std::to_string(v.end));
    }
    for (int j = 0; j < n; ++j) {
        std::vector<LinearProgram::Term> terms;
        for (std::size_t k = 0; k < model.variables.size(); ++k)
            if (model.variables[k].job_index == j) terms.push_back({static_cast<int>(k), 1.0});
        lp.add_row(std::move(terms), Relation::kGreaterEqual, 1.0, "assign_j" + std::to_string(instance.jobs[j].id));
    }
    RowSet rows;
    for (std::size_t t = 0; t < grid.size(); ++t) {
        std::vector<int> row;
        for (std::size_t k = 0; k < model.variables.size(); ++k)
            if (model.variables[k].start < t && t < model.variables[k].end) row.push_back(static_cast<int>(k));
        rows.le.push_back(std::move(row));
    }
    if (include_constraint_3) {
        for (std::size_t A = 0; A < grid.size(); ++A)
            for (std::size_t B = A + 1; B < grid.size(); ++B)
                for (int j = 0; j < n; ++j) {
                    std::vector<int> row;
                    for (std::size_t k = 0; k < model.variables.size(); ++k)
                        if (overlap_coeff(model.variables[k], A, B, j)) row.push_back(static_cast<int>(k));
                    rows.le.push_back(std::move(row));
                }
    }
    prune(rows, model.pruned_rows, options.max_rows_for_pruning);
    for (std::size_t r = 0; r < rows.le.size(); ++r) {
        std::vector<LinearProgram::Term> terms;
        for (int k : rows.le[r]) terms.push_back({k, 1.0});
        lp.add_row(std::move(terms), Relation::kLessEqual, 1.0, "cap" + std::to_string(r));
    }
    model.lp = std::move(lp);
    return model;
}

namespace {

Lp1Result solve_full(const Lp1Model& model) {
    const Lp1Model* m = &model;
    Lp1Model built;
    if (!model.lp) {
        Lp1BuildOptions opt;
        opt.materialize = true;
        built = build_lp1(model.instance, model.grid, model.include_constraint_3, opt);
        m = &built;
    }
    const LinearProgram& lp = *m->lp;
    const double entries = static_cast<double>(lp.rows.size()) * static_cast<double>(lp.num_vars() + 2 * lp.rows.size());
    if (entries > 6e7) throw SizeLimitError("materialized relaxation is too large for the dense simplex");
    const LpSolution s = solve_lp(lp);
    if (s.status == LpStatus::kInfeasible)
        throw InfeasibleError("relaxation infeasible on the " + grid_name(model.grid) + "; the grid is too coarse");
    if (s.status != LpStatus::kOptimal) throw std::runtime_error("LP solver did not certify an optimum: " + s.message);
    Lp1Result r;
    r.status = s.status;
    r.solution = to_solution(*m, m->variables, s.values);
    r.value = fractional_energy(r.solution, model.instance);
    r.columns = lp.num_vars();
    r.rows = lp.rows.size();
    for (const auto& row : lp.rows) r.nonzeros += row.terms.size();
    r.rounds = 1;
    r.method = "full";
    return r;
}

// Columns and rows of a solved master in time coordinates, used to warm-start
// the master on a finer grid that contains the same points.
struct GenerationSeed {
    std::vector<std::tuple<int, Rational, Rational>> columns;  // job index, start, end
    std::vector<std::tuple<int, Rational, Rational>> rows;     // job index (-1 for point rows), A, B
};

// Row and column generation: the restricted master holds a subset of the
// columns and of the capacity rows; missing columns are priced with the
// master's duals and missing rows are separated against its primal solution.
// Rows that stay slack and columns that stay unattractive for several rounds
// are dropped again to keep the warm-started tableau small.
class Generator {
public:
    Generator(const Lp1Model& model, const Lp1SolveOptions& options, const GenerationSeed* seed = nullptr)
        : model_(model), options_(options), g_(grid_view(model)), n_(static_cast<int>(model.instance.jobs.size())), gs_(g_.t.size()) {
        for (int j = 0; j < n_; ++j) add_column({j, g_.range[j].first, g_.range[j].second});
        if (seed) plant(*seed);
        double max_full_cost = 0.0;
        for (const auto& c : cols_) max_full_cost = std::max(max_full_cost, model_.cost(c.var));
        big_m_ = 1e4 * std::max(1.0, max_full_cost) * std::max(1, n_);
    }

    Lp1Result run() {
        for (int attempt = 0; attempt < 3; ++attempt) {
            converge();
            if (max_artificial() <= 1e-9) return finish();
            // Decide feasibility exactly: minimize the artificial mass alone.
            phase1_ = true;
            session_.reset();
            converge();
            const bool infeasible = master_value_ > 1e-9;
            phase1_ = false;
            session_.reset();
            if (infeasible) break;
            big_m_ *= 100.0;
        }
        throw InfeasibleError("relaxation infeasible on the " + grid_name(model_.grid) + "; the grid is too coarse");
    }

    /// Support columns, zero reduced-cost columns and tight rows of the last master.
    [[nodiscard]] GenerationSeed active_set() const {
        GenerationSeed out;
        const auto& pts = model_.grid.points;
        for (std::size_t k = 0; k < cols_.size(); ++k)
            if (x_[k] > 1e-12 || reduced_[k] <= 1e-9)
                out.columns.emplace_back(cols_[k].var.job_index, pts[cols_[k].var.start], pts[cols_[k].var.end]);
        for (const auto& r : rows_) {
            double activity = 0.0;
            for (std::size_t k = 0; k < cols_.size(); ++k)
                if (covers(r, cols_[k].var)) activity += x_[k];
            if (activity < 1.0 - 1e-9) continue;
            if (r.point) out.rows.emplace_back(-1, pts[r.t], pts[r.t]);
            else out.rows.emplace_back(r.overlap.job, pts[r.overlap.A], pts[r.overlap.B]);
        }
        return out;
    }

private:
    void plant(const GenerationSeed& seed) {
        const auto& grid = model_.grid;
        for (const auto& [job, a, b] : seed.columns) {
            const auto s = grid.index_of(a), e = grid.index_of(b);
            if (s && e) add_column({job, *s, *e});
        }
        for (const auto& [job, a, b] : seed.rows) {
            const auto s = grid.index_of(a), e = grid.index_of(b);
            if (!s || !e) continue;
            if (job < 0) {
                if (!point_set_.count(*s)) add_row({true, *s, {}, 0});
            } else if (const OverlapRow row{*s, *e, job}; !overlap_set_.count(row)) {
                add_row({false, 0, row, 0});
            }
        }
    }

    struct OverlapRow {
        std::size_t A, B;
        int job;
        auto operator<=>(const OverlapRow&) const = default;
    };
    struct MasterRow {
        bool point = true;
        std::size_t t = 0;
        OverlapRow overlap{};
        int idle = 0;
    };
    struct MasterCol {
        Lp1Variable var;
        int idle = 0;
    };

    static constexpr int kRowPatience = 4;
    static constexpr int kColPatience = 6;

    // Items dropped before wait twice as long each time, so drop-and-re-add cycles die out.
    template <class Key>
    static int patience(const std::map<Key, int>& dropped, const Key& key, int base) {
        const auto it = dropped.find(key);
        return it == dropped.end() ? base : base << std::min(it->second, 16);
    }

    using ColKey = std::tuple<int, std::size_t, std::size_t>;
    using RowKey = std::tuple<int, std::size_t, std::size_t>;  // job (-1 for point rows), A, B
    static ColKey col_key(const Lp1Variable& v) { return {v.job_index, v.start, v.end}; }
    static RowKey row_key(const MasterRow& r) {
        return r.point ? RowKey{-1, r.t, r.t} : RowKey{r.overlap.job, r.overlap.A, r.overlap.B};
    }

    [[nodiscard]] bool covers(const MasterRow& r, const Lp1Variable& v) const {
        if (r.point) return v.start < r.t && r.t < v.end;
        return overlap_coeff(v, r.overlap.A, r.overlap.B, r.overlap.job);
    }

    bool add_column(const Lp1Variable& v) {
        if (!col_keys_.insert(col_key(v)).second) return false;
        cols_.push_back({v, 0});
        if (session_) push_column(v);
        return true;
    }

    void add_row(const MasterRow& r) {
        rows_.push_back(r);
        if (r.point) point_set_.insert(r.t);
        else overlap_set_.insert(r.overlap);
        if (session_) push_row(r);
    }

    void push_column(const Lp1Variable& v) {
        std::vector<std::pair<int, double>> e;
        e.push_back({v.job_index, 1.0});
        for (std::size_t k = 0; k < rows_.size(); ++k)
            if (covers(rows_[k], v)) e.push_back({n_ + static_cast<int>(k), 1.0});
        session_->add_column(column_cost(v), e);
    }

    void push_row(const MasterRow& r) {
        std::vector<std::pair<int, double>> e;
        for (std::size_t k = 0; k < cols_.size(); ++k)
            if (covers(r, cols_[k].var)) e.push_back({n_ + static_cast<int>(k), 1.0});
        session_->add_row(e, Relation::kLessEqual, 1.0);
    }

    [[nodiscard]] double column_cost(const Lp1Variable& v) const { return phase1_ ? 0.0 : model_.cost(v); }
    [[nodiscard]] double max_artificial() const {
        double art = 0.0;
        for (double a : art_values_) art = std::max(art, a);
        return art;
    }

    void converge() {
        if (!loop()) throw std::runtime_error("column generation did not converge within the round limit");
    }

    void rebuild_session() {
        session_ = std::make_unique<IncrementalSimplex>();
        for (int j = 0; j < n_; ++j) session_->add_row({}, Relation::kGreaterEqual, 1.0);
        for (std::size_t k = 0; k < rows_.size(); ++k) session_->add_row({}, Relation::kLessEqual, 1.0);
        for (int j = 0; j < n_; ++j) session_->add_column(phase1_ ? 1.0 : big_m_, {{j, 1.0}});
        for (const auto& c : cols_) push_column(c.var);
    }

    [[nodiscard]] LpSolution session_solution() const {
        LpSolution sol;
        sol.values = session_->values();
        sol.duals = session_->duals();
        certify_solution(session_->program(), sol);
        return sol;
    }

    void solve_master() {
        if (!session_) rebuild_session();
        LpSolution sol;
        if (session_->solve() == LpStatus::kOptimal) sol = session_solution();
        if (sol.status != LpStatus::kOptimal) {
            // Accumulated round-off: restart from a fresh basis, then from the dense solver.
            rebuild_session();
            if (session_->solve() == LpStatus::kOptimal) sol = session_solution();
            if (sol.status != LpStatus::kOptimal) {
                sol = solve_lp(session_->program());
                session_.reset();
                if (sol.status != LpStatus::kOptimal)
                    throw std::runtime_error("restricted master not solved: " + to_string(sol.status) + " " + sol.message);
            }
        }
        master_value_ = sol.objective;
        art_values_.assign(sol.values.begin(), sol.values.begin() + n_);
        x_.assign(sol.values.begin() + n_, sol.values.end());
        job_dual_.assign(sol.duals.begin(), sol.duals.begin() + n_);
        row_dual_.assign(sol.duals.begin() + n_, sol.duals.end());
        reduced_.assign(cols_.size(), 0.0);
        for (std::size_t k = 0; k < cols_.size(); ++k) reduced_[k] = sol.reduced_costs[n_ + k];
        last_rows_ = static_cast<std::size_t>(n_) + rows_.size();
        last_nnz_ = 0;
        for (const auto& c : cols_) {
            last_nnz_ += 1;
            for (const auto& r : rows_)
                if (covers(r, c.var)) ++last_nnz_;
        }
    }

    void purge() {
        if (!session_) return;
        std::vector<int> drop_rows;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const int row = n_ + static_cast<int>(k);
            if (session_->row_slack(row) > 1e-7) ++rows_[k].idle;
            else rows_[k].idle = 0;
            if (rows_[k].idle >= patience(dropped_rows_, row_key(rows_[k]), kRowPatience)) drop_rows.push_back(row);
        }
        std::vector<int> drop_cols;
        for (std::size_t k = 0; k < cols_.size(); ++k) {
            const int col = n_ + static_cast<int>(k);
            if (session_->column_basic(col) || reduced_[k] <= 1e-6) cols_[k].idle = 0;
            else ++cols_[k].idle;
            if (cols_[k].idle >= patience(dropped_cols_, col_key(cols_[k].var), kColPatience)) drop_cols.push_back(col);
        }
        if (!drop_rows.empty()) {
            session_->remove_rows(drop_rows);
            std::vector<MasterRow> kept;
            std::size_t d = 0;
            for (std::size_t k = 0; k < rows_.size(); ++k) {
                if (d < drop_rows.size() && drop_rows[d] == n_ + static_cast<int>(k)) {
                    ++d;
                    ++dropped_rows_[row_key(rows_[k])];
                    if (rows_[k].point) point_set_.erase(rows_[k].t);
                    else overlap_set_.erase(rows_[k].overlap);
                    continue;
                }
                kept.push_back(rows_[k]);
            }
            rows_ = std::move(kept);
        }
        if (!drop_cols.empty()) {
            session_->remove_columns(drop_cols);
            std::vector<MasterCol> kept;
            std::vector<double> kept_x;
            std::size_t d = 0;
            for (std::size_t k = 0; k < cols_.size(); ++k) {
                if (d < drop_cols.size() && drop_cols[d] == n_ + static_cast<int>(k)) {
                    ++d;
                    ++dropped_cols_[col_key(cols_[k].var)];
                    col_keys_.erase(col_key(cols_[k].var));
                    continue;
                }
                kept.push_back(cols_[k]);
                kept_x.push_back(x_[k]);
            }
            cols_ = std::move(kept);
            x_ = std::move(kept_x);
        }
    }

    // Adds the most negative reduced-cost columns; returns how many were added.
    std::size_t price() {
        const std::size_t g = gs_;
        std::vector<double> point_dual(g, 0.0);
        std::vector<std::pair<OverlapRow, double>> overlap;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            if (rows_[k].point) point_dual[rows_[k].t] += row_dual_[k];
            else overlap.push_back({rows_[k].overlap, row_dual_[k]});
        }
        std::vector<double> V(g + 1, 0.0);  // V[k] = sum of point duals at indices < k
        for (std::size_t k = 0; k < g; ++k) V[k + 1] = V[k] + point_dual[k];

        std::vector<double> q_all, q_job;
        const bool has_overlap = !overlap.empty();
        auto build_table = [&](std::vector<double>& q, int only_job) {
            // q[a][b] = sum of duals of rows (A, B) with A >= a and B <= b.
            q.assign(g * g, 0.0);
            for (const auto& [row, y] : overlap)
                if (only_job < 0 || row.job == only_job) q[row.A * g + row.B] += y;
            for (std::size_t a = g; a-- > 0;)
                for (std::size_t b = 0; b < g; ++b) {
                    double v = q[a * g + b];
                    if (a + 1 < g) v += q[(a + 1) * g + b];
                    if (b > 0) v += q[a * g + b - 1];
                    if (a + 1 < g && b > 0) v -= q[(a + 1) * g + b - 1];
                    q[a * g + b] = v;
                }
        };
        if (has_overlap) build_table(q_all, -1);

        std::size_t added = 0;
        lower_bound_ = master_value_;
        for (int j = 0; j < n_; ++j) {
            const auto [lo, hi] = g_.range[j];
            std::vector<double> end_le(g + 1, 0.0), start_ge(g + 2, 0.0);
            double same_total = 0.0;
            if (has_overlap) {
                build_table(q_job, j);
                for (const auto& [row, y] : overlap) {
                    if (row.job != j) continue;
                    same_total += y;
                    end_le[row.B] += y;
                    start_ge[row.A] += y;
                }
                for (std::size_t k = 1; k <= g; ++k) end_le[k] += end_le[k - 1];
                for (std::size_t k = g; k-- > 0;) start_ge[k] += start_ge[k + 1];
            }
            const Job& job = model_.instance.jobs[j];
            const double wa = phase1_ ? 0.0 : std::pow(job.work.to_double(), model_.instance.alpha) / model_.cost_scale;
            std::vector<std::pair<double, Lp1Variable>> candidates;
            double min_rc = 0.0;
            for (std::size_t a = lo; a < hi; ++a)
                for (std::size_t b = a + 1; b <= hi; ++b) {
                    double rc = wa / std::pow(g_.t[b] - g_.t[a], model_.instance.alpha - 1.0) - job_dual_[j];
                    rc -= V[b] - V[a + 1];
                    if (has_overlap) {
                        const double same = same_total - end_le[a] - start_ge[b];
                        const double other = q_all[a * g + b] - q_job[a * g + b];
                        rc -= same + other;
                    }
                    min_rc = std::min(min_rc, rc);
                    if (rc < -1e-9) candidates.push_back({rc, {j, a, b}});
                }
            std::sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
                if (x.first != y.first) return x.first < y.first;
                return std::tie(x.second.start, x.second.end) < std::tie(y.second.start, y.second.end);
            });
            lower_bound_ += min_rc;
            std::size_t taken = 0;
            for (const auto& [rc, v] : candidates) {
                if (taken >= options_.columns_per_job) break;
                if (add_column(v)) {
                    ++taken;
                    ++added;
                }
            }
        }
        return added;
    }

    // Adds the most violated capacity rows; returns how many were added.
    std::size_t separate() {
        const std::size_t g = gs_;
        std::vector<std::pair<double, std::size_t>> point_viol;
        std::vector<double> diff(g + 1, 0.0);
        for (std::size_t k = 0; k < cols_.size(); ++k) {
            if (x_[k] <= 0) continue;
            diff[cols_[k].var.start + 1] += x_[k];
            diff[cols_[k].var.end] -= x_[k];
        }
        double load = 0.0;
        for (std::size_t t = 0; t < g; ++t) {
            load += diff[t];
            if (load > 1.0 + 1e-9 && !point_set_.count(t)) point_viol.push_back({load - 1.0, t});
        }
        std::sort(point_viol.begin(), point_viol.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        std::size_t added = 0;
        for (const auto& [v, t] : point_viol) {
            if (added >= options_.rows_per_round) break;
            add_row({true, t, {}, 0});
            ++added;
        }
        if (!model_.include_constraint_3) return added;

        // D[a][b] = support mass with start <= a and end >= b (per job and total).
        std::vector<std::vector<double>> D(n_ + 1);
        std::vector<double> total(n_, 0.0);
        std::vector<std::vector<double>> end_le(n_, std::vector<double>(g + 1, 0.0));
        std::vector<std::vector<double>> start_ge(n_, std::vector<double>(g + 2, 0.0));
        for (std::size_t k = 0; k < cols_.size(); ++k)
            if (x_[k] > 1e-12) total[cols_[k].var.job_index] += x_[k];
        for (int j = 0; j <= n_; ++j)
            if (j == n_ || total[j] > 0) D[j].assign(g * g, 0.0);
        for (std::size_t k = 0; k < cols_.size(); ++k) {
            if (x_[k] <= 1e-12) continue;
            const auto& c = cols_[k].var;
            D[c.job_index][c.start * g + c.end] += x_[k];
            D[n_][c.start * g + c.end] += x_[k];
            end_le[c.job_index][c.end] += x_[k];
            start_ge[c.job_index][c.start] += x_[k];
        }
        for (int j = 0; j <= n_; ++j) {
            if (D[j].empty()) continue;
            auto& d = D[j];
            for (std::size_t a = 0; a < g; ++a)
                for (std::size_t b = g; b-- > 0;) {
                    double v = d[a * g + b];
                    if (a > 0) v += d[(a - 1) * g + b];
                    if (b + 1 < g) v += d[a * g + b + 1];
                    if (a > 0 && b + 1 < g) v -= d[(a - 1) * g + b + 1];
                    d[a * g + b] = v;
                }
        }
        for (int j = 0; j < n_; ++j) {
            for (std::size_t k = 1; k <= g; ++k) end_le[j][k] += end_le[j][k - 1];
            for (std::size_t k = g; k-- > 0;) start_ge[j][k] += start_ge[j][k + 1];
        }
        std::vector<std::pair<double, OverlapRow>> viol;
        for (std::size_t A = 0; A < g; ++A)
            for (std::size_t B = A + 1; B < g; ++B) {
                const double all = D[n_][A * g + B];
                for (int j = 0; j < n_; ++j) {
                    const double mine = D[j].empty() ? 0.0 : D[j][A * g + B];
                    const double inter = total[j] - end_le[j][A] - start_ge[j][B];
                    const double value = inter + all - mine;
                    if (value > 1.0 + 1e-9) {
                        OverlapRow row{A, B, j};
                        if (!overlap_set_.count(row)) viol.push_back({value - 1.0, row});
                    }
                }
            }
        std::sort(viol.begin(), viol.end(), [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
        // Ties are common (many rows at the same violation), so spread the picks:
        // first at most one row per (job, start) and per (job, end), then the rest in order.
        std::size_t taken = 0;
        std::set<std::pair<int, std::size_t>> used_start, used_end;
        std::vector<char> chosen(viol.size(), 0);
        for (std::size_t pass = 0; pass < 2; ++pass)
            for (std::size_t k = 0; k < viol.size() && taken < options_.rows_per_round; ++k) {
                const OverlapRow& row = viol[k].second;
                if (chosen[k]) continue;
                if (pass == 0 && (used_start.count({row.job, row.A}) || used_end.count({row.job, row.B}))) continue;
                used_start.insert({row.job, row.A});
                used_end.insert({row.job, row.B});
                chosen[k] = 1;
                add_row({false, 0, row, 0});
                ++taken;
            }
        return added + taken;
    }

    bool loop() {
        for (int round = 0; round < options_.max_rounds; ++round) {
            ++rounds_;
            solve_master();
            purge();
            const std::size_t priced = price();
            // While the Lagrangian bound is still far off, keep pricing before separating.
            const bool far = priced > 0 && master_value_ - lower_bound_ > 1e-3 * std::fabs(master_value_);
            const std::size_t separated = far ? 0 : separate();
            if (priced + separated == 0) return true;
        }
        return false;
    }

    Lp1Result finish() {
        Lp1Result r;
        r.status = LpStatus::kOptimal;
        std::vector<Lp1Variable> vars;
        for (const auto& c : cols_) vars.push_back(c.var);
        r.solution = to_solution(model_, vars, x_);
        r.value = fractional_energy(r.solution, model_.instance);
        r.columns = cols_.size();
        r.rows = last_rows_;
        r.nonzeros = last_nnz_;
        r.rounds = rounds_;
        r.method = "generation";
        return r;
    }

    const Lp1Model& model_;
    const Lp1SolveOptions& options_;
    Grid g_;
    int n_;
    std::size_t gs_;
    std::vector<MasterCol> cols_;
    std::set<ColKey> col_keys_;
    std::map<ColKey, int> dropped_cols_;
    std::map<RowKey, int> dropped_rows_;
    std::vector<MasterRow> rows_;
    std::set<std::size_t> point_set_;
    std::set<OverlapRow> overlap_set_;
    double big_m_ = 1.0;
    bool phase1_ = false;
    double master_value_ = 0.0;
    double lower_bound_ = 0.0;
    std::unique_ptr<IncrementalSimplex> session_;
    std::vector<double> x_, art_values_, job_dual_, row_dual_, reduced_;
    std::size_t last_rows_ = 0, last_nnz_ = 0;
    int rounds_ = 0;
};

}  // namespace

namespace {

// Solves on a chain of nested coarser grids first; each level seeds the next.
Lp1Result solve_generation(const Lp1Model& model, const Lp1SolveOptions& options, GenerationSeed* active = nullptr) {
    const std::int64_t cells = model.grid.inserted_per_gap + 1;
    std::optional<GenerationSeed> seed;
    if (cells >= 3) {
        std::int64_t coarse = 1;
        for (std::int64_t d = cells / 3; d >= 1; --d)
            if (cells % d == 0) {
                coarse = d;
                break;
            }
        std::vector<Rational> endpoints;
        for (std::size_t i = 0; i < model.grid.size(); ++i)
            if (model.grid.is_endpoint[i]) endpoints.push_back(model.grid.points[i]);
        Lp1Model coarse_model = model;
        coarse_model.grid = build_grid_from_endpoints(endpoints, coarse);
        coarse_model.lp.reset();
        coarse_model.variables.clear();
        try {
            seed.emplace();
            solve_generation(coarse_model, options, &*seed);
        } catch (const std::exception&) {
            // A coarse level only supplies a warm start; the fine grid is solved regardless.
            seed.reset();
        }
    }
    Generator gen(model, options, seed ? &*seed : nullptr);
    Lp1Result r = gen.run();
    if (active) *active = gen.active_set();
    return r;
}

}  // namespace

Lp1Result solve_lp1(const Lp1Model& model, const Lp1SolveOptions& options) {
    if (model.instance.jobs.empty()) {
        Lp1Result r;
        r.status = LpStatus::kOptimal;
        r.solution.alpha = model.instance.alpha;
        r.method = "empty";
        return r;
    }
    Lp1Method method = options.method;
    if (method == Lp1Method::kAuto) method = model.lp ? Lp1Method::kFull : Lp1Method::kGeneration;
    if (method == Lp1Method::kFull) return solve_full(model);
    return solve_generation(model, options);
}

bool ConstraintReport::ok(double tol, bool with_constraint_3) const {
    if (max_assignment_deficit > tol || max_point_load > 1.0 + tol) return false;
    return !with_constraint_3 || max_overlap_sum <= 1.0 + tol;
}

double overlap_row_value(const FractionalSolution& x, const Interval& I, int job) {
    double v = 0.0;
    for (const auto& [key, val] : x.values) {
        const Interval& J = key.second;
        if (key.first == job ? interiors_intersect(J, I) : contains(J, I)) v += val;
    }
    return v;
}

ConstraintReport check_lp1_constraints(const FractionalSolution& x, const Instance& instance, bool with_constraint_3) {
    ConstraintReport rep;
    const auto mass = x.mass_per_job();
    rep.max_assignment_deficit = -std::numeric_limits<double>::infinity();
    for (const auto& job : instance.jobs) {
        auto it = mass.find(job.id);
        rep.max_assignment_deficit = std::max(rep.max_assignment_deficit, 1.0 - (it == mass.end() ? 0.0 : it->second));
    }
    if (instance.jobs.empty()) rep.max_assignment_deficit = 0.0;

    std::vector<Rational> bps;
    for (const auto& [key, v] : x.values) {
        bps.push_back(key.second.start);
        bps.push_back(key.second.end);
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    auto idx = [&](const Rational& t) { return 2 * static_cast<int>(std::lower_bound(bps.begin(), bps.end(), t) - bps.begin()); };
    struct Item {
        int job, s, e;
        double v;
    };
    std::vector<Item> items;
    std::map<int, int> job_slot;
    for (const auto& job : instance.jobs) job_slot.emplace(job.id, static_cast<int>(job_slot.size()));
    for (const auto& [key, v] : x.values) {
        if (!job_slot.count(key.first)) job_slot.emplace(key.first, static_cast<int>(job_slot.size()));
        items.push_back({job_slot[key.first], idx(key.second.start), idx(key.second.end), v});
    }
    const int points = bps.empty() ? 0 : 2 * static_cast<int>(bps.size()) - 1;
    // Odd positions are open segments between consecutive breakpoints.
    for (int p = 1; p < points; p += 2) {
        double load = 0.0;
        for (const auto& it : items)
            if (it.s < p && p < it.e) load += it.v;
        rep.max_point_load = std::max(rep.max_point_load, load);
    }
    if (!with_constraint_3) return rep;
    const int slots = static_cast<int>(job_slot.size());
    std::vector<double> inter(slots), cont(slots);
    std::vector<int> slot_job(slots);
    for (const auto& [id, s] : job_slot) slot_job[s] = id;
    for (int a = 0; a < points; ++a)
        for (int b = a + 1; b < points; ++b) {
            std::fill(inter.begin(), inter.end(), 0.0);
            std::fill(cont.begin(), cont.end(), 0.0);
            double cont_all = 0.0;
            for (const auto& it : items) {
                if (it.s < b && a < it.e) inter[it.job] += it.v;
                if (it.s <= a && b <= it.e) {
                    cont[it.job] += it.v;
                    cont_all += it.v;
                }
            }
            for (int j = 0; j < slots; ++j) {
                const double value = inter[j] + cont_all - cont[j];
                if (value > rep.max_overlap_sum) {
                    rep.max_overlap_sum = value;
                    std::ostringstream os;
                    auto at = [&](int p) { return p % 2 == 0 ? bps[p / 2] : (bps[p / 2] + bps[p / 2 + 1]) / 2; };
                    os << "I=[" << at(a) << ", " << at(b) << "], job " << slot_job[j];
                    rep.worst_overlap_row = os.str();
                }
            }
        }
    return rep;
}

}  // namespace speedscale
