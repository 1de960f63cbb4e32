#pragma once

// Reference computations for the tests. They share no code with the library
// routines they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "speedscale/instance.hpp"
#include "speedscale/lp.hpp"
#include "speedscale/matching.hpp"

namespace oracle_support {

/// Optimal preemptive single-processor energy. Speed is constant on every cell
/// between consecutive endpoints, so the problem is convex in the work each
/// job puts in each cell. Solved by block coordinate descent: each job in turn
/// water-fills its work over its cells given everyone else's load.
inline double convex_preemptive_energy(const speedscale::Instance& inst, int max_sweeps = 20000) {
    std::vector<double> pts;
    for (const auto& j : inst.jobs) {
        pts.push_back(j.release.to_double());
        pts.push_back(j.deadline.to_double());
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t cells = pts.size() - 1;
    std::vector<double> len(cells);
    for (std::size_t k = 0; k < cells; ++k) len[k] = pts[k + 1] - pts[k];

    const std::size_t n = inst.jobs.size();
    std::vector<std::vector<std::size_t>> alive(n);
    std::vector<std::vector<double>> share(n, std::vector<double>(cells, 0.0));
    std::vector<double> load(cells, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = inst.jobs[j].release.to_double(), d = inst.jobs[j].deadline.to_double(), w = inst.jobs[j].work.to_double();
        for (std::size_t k = 0; k < cells; ++k)
            if (pts[k] >= r && pts[k + 1] <= d) alive[j].push_back(k);
        for (auto k : alive[j]) {
            share[j][k] = w * len[k] / (d - r);
            load[k] += share[j][k];
        }
    }
    auto energy = [&] {
        double e = 0.0;
        for (std::size_t k = 0; k < cells; ++k) e += len[k] * std::pow(load[k] / len[k], inst.alpha);
        return e;
    };
    double prev = energy();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = inst.jobs[j].work.to_double();
            for (auto k : alive[j]) load[k] -= share[j][k];
            // Raise the common speed level until the job's work fits.
            auto filled = [&](double level) {
                double s = 0.0;
                for (auto k : alive[j]) s += std::max(0.0, level * len[k] - load[k]);
                return s;
            };
            double lo = 0.0, hi = 1.0;
            while (filled(hi) < w) hi *= 2;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (filled(mid) < w ? lo : hi) = mid;
            }
            double total = 0.0;
            for (auto k : alive[j]) total += (share[j][k] = std::max(0.0, hi * len[k] - load[k]));
            for (auto k : alive[j]) {
                share[j][k] *= w / total;
                load[k] += share[j][k];
            }
        }
        const double e = energy();
        if (std::abs(prev - e) <= 1e-15 * e) break;
        prev = e;
    }
    return energy();
}

/// Bell numbers by the recurrence B(k+1) = sum_i C(k, i) B(i).
inline std::vector<double> bell_numbers(int count) {
    std::vector<double> b{1.0};
    for (int k = 0; k + 1 < count; ++k) {
        double next = 0.0, binom = 1.0;
        for (int i = 0; i <= k; ++i) {
            next += binom * b[i];
            binom = binom * (k - i) / (i + 1);
        }
        b.push_back(next);
    }
    return b;
}

struct VertexOptimum {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
    std::vector<double> x;
};

/// Minimum over all basic feasible points: every choice of num_vars tight
/// constraints (rows or lower bounds, equalities always included) is solved by
/// Gaussian elimination. Only for tiny bounded programs.
inline VertexOptimum enumerate_vertices(const speedscale::LinearProgram& lp) {
    using speedscale::Relation;
    const int n = lp.num_vars();
    struct Con {
        std::vector<double> a;
        double b;
        Relation rel;
    };
    std::vector<Con> cons;
    for (const auto& row : lp.rows) {
        Con c{std::vector<double>(n, 0.0), row.rhs, row.relation};
        for (const auto& t : row.terms) c.a[t.var] += t.coeff;
        cons.push_back(std::move(c));
    }
    for (int i = 0; i < n; ++i) {
        Con c{std::vector<double>(n, 0.0), lp.lower[i], Relation::kGreaterEqual};
        c.a[i] = 1.0;
        cons.push_back(std::move(c));
    }
    auto feasible = [&](const std::vector<double>& x) {
        for (const auto& c : cons) {
            const double v = std::inner_product(c.a.begin(), c.a.end(), x.begin(), 0.0);
            if (c.rel == Relation::kLessEqual && v > c.b + 1e-9) return false;
            if (c.rel == Relation::kGreaterEqual && v < c.b - 1e-9) return false;
            if (c.rel == Relation::kEqual && std::abs(v - c.b) > 1e-9) return false;
        }
        return true;
    };
    VertexOptimum best;
    std::vector<int> pick;
    std::function<void(int)> rec = [&](int from) {
        if (static_cast<int>(pick.size()) == n) {
            for (std::size_t k = 0; k < cons.size(); ++k)
                if (cons[k].rel == Relation::kEqual && std::find(pick.begin(), pick.end(), static_cast<int>(k)) == pick.end()) return;
            std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) m[r][c] = cons[pick[r]].a[c];
                m[r][n] = cons[pick[r]].b;
            }
            for (int c = 0; c < n; ++c) {
                int p = c;
                for (int r = c + 1; r < n; ++r)
                    if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
                if (std::abs(m[p][c]) < 1e-12) return;
                std::swap(m[p], m[c]);
                for (int r = 0; r < n; ++r) {
                    if (r == c) continue;
                    const double f = m[r][c] / m[c][c];
                    for (int k = c; k <= n; ++k) m[r][k] -= f * m[c][k];
                }
            }
            std::vector<double> x(n);
            for (int r = 0; r < n; ++r) x[r] = m[r][n] / m[r][r];
            if (!feasible(x)) return;
            const double obj = std::inner_product(lp.objective.begin(), lp.objective.end(), x.begin(), 0.0);
            if (obj < best.objective) best = {true, obj, x};
            return;
        }
        for (int k = from; k < static_cast<int>(cons.size()); ++k) {
            pick.push_back(k);
            rec(k + 1);
            pick.pop_back();
        }
    };
    rec(0);
    return best;
}

/// Cheapest left-saturating matching by trying every edge choice; infinity when none exists.
inline double exhaustive_matching_cost(int left_count, int right_count, const std::vector<speedscale::BipartiteEdge>& edges) {
    std::vector<std::vector<const speedscale::BipartiteEdge*>> by_left(left_count);
    for (const auto& e : edges) by_left[e.left].push_back(&e);
    std::vector<bool> used(right_count, false);
    double best = std::numeric_limits<double>::infinity();
    std::function<void(int, double)> rec = [&](int l, double cost) {
        if (l == left_count) {
            best = std::min(best, cost);
            return;
        }
        for (const auto* e : by_left[l]) {
            if (used[e->right]) continue;
            used[e->right] = true;
            rec(l + 1, cost + e->cost);
            used[e->right] = false;
        }
    };
    rec(0, 0.0);
    return best;
}

}  // namespace oracle_support
