#include "speedscale/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "speedscale/errors.hpp"

namespace speedscale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Sorted, merged, pairwise disjoint intervals.
class IntervalSet {
public:
    void add(Interval iv) {
        std::vector<Interval> out;
        for (const auto& p : parts_) {
            if (p.end < iv.start || iv.end < p.start) {
                out.push_back(p);
            } else {
                iv = {min(iv.start, p.start), max(iv.end, p.end)};
            }
        }
        out.push_back(iv);
        std::sort(out.begin(), out.end());
        parts_ = std::move(out);
    }

    [[nodiscard]] Rational covered(const Interval& iv) const {
        Rational total = 0;
        for (const auto& p : parts_) {
            const Rational lo = max(p.start, iv.start), hi = min(p.end, iv.end);
            if (lo < hi) total += hi - lo;
        }
        return total;
    }

    /// Maximal sub-intervals of `iv` not covered by the set.
    [[nodiscard]] std::vector<Interval> gaps(const Interval& iv) const {
        std::vector<Interval> out;
        Rational t = iv.start;
        for (const auto& p : parts_) {
            if (p.end <= t || p.start >= iv.end) continue;
            if (p.start > t) out.push_back({t, p.start});
            t = max(t, p.end);
        }
        if (t < iv.end) out.push_back({t, iv.end});
        return out;
    }

private:
    std::vector<Interval> parts_;
};

struct Pending {
    const Job* job;
    Rational left;
};

/// Earliest-deadline-first over `pieces` at constant `speed`; appends the work pieces.
void edf_allocate(std::vector<Pending> jobs, const std::vector<Interval>& pieces, const Rational& speed, std::vector<WorkPiece>& out) {
    std::sort(jobs.begin(), jobs.end(), [](const Pending& a, const Pending& b) {
        return std::tie(a.job->deadline, a.job->id) < std::tie(b.job->deadline, b.job->id);
    });
    for (const auto& piece : pieces) {
        Rational t = piece.start;
        while (t < piece.end) {
            Pending* run = nullptr;
            Rational next_release = piece.end;
            for (auto& p : jobs) {
                if (p.left == 0) continue;
                if (p.job->release <= t) {
                    if (!run) run = &p;
                } else {
                    next_release = min(next_release, p.job->release);
                }
            }
            if (!run) {
                t = next_release;
                continue;
            }
            Rational stop = min(t + run->left / speed, next_release);
            const Interval iv{t, stop};
            const Rational done = iv.length() * speed;
            if (stop > run->job->deadline)
                throw ContractViolation("preemptive allocation misses the deadline of job " + std::to_string(run->job->id));
            if (!out.empty() && out.back().job == run->job->id && out.back().interval.end == t) {
                out.back().interval.end = stop;
                out.back().work += done;
            } else {
                out.push_back({run->job->id, iv, done});
            }
            run->left -= done;
            t = stop;
        }
    }
    for (const auto& p : jobs)
        if (p.left != 0) throw ContractViolation("preemptive allocation leaves work of job " + std::to_string(p.job->id) + " unscheduled");
}

}  // namespace

double SpeedProfile::energy(double alpha) const {
    double total = 0.0;
    for (const auto& s : segments) total += s.interval.length().to_double() * std::pow(s.speed.to_double(), alpha);
    return total;
}

Rational SpeedProfile::speed_at(const Rational& t) const {
    for (const auto& s : segments)
        if (s.interval.start <= t && t < s.interval.end) return s.speed;
    return 0;
}

YdsResult yds_preemptive(const Instance& instance) {
    instance.validate();
    if (instance.processors != 1) throw std::domain_error("the preemptive optimum is computed for one processor");
    std::vector<const Job*> remaining;
    for (const auto& j : instance.jobs) remaining.push_back(&j);
    IntervalSet blocked;
    YdsResult result;
    while (!remaining.empty()) {
        bool found = false;
        Interval best;
        Rational best_density;
        for (const Job* a : remaining) {
            for (const Job* b : remaining) {
                const Interval cand{a->release, b->deadline};
                if (cand.start >= cand.end) continue;
                Rational work = 0;
                for (const Job* j : remaining)
                    if (contains(cand, j->life())) work += j->work;
                if (work == 0) continue;
                const Rational free = cand.length() - blocked.covered(cand);
                if (free == 0) throw ContractViolation("jobs remain inside an already saturated interval");
                const Rational density = work / free;
                const bool better = !found || density > best_density ||
                                    (density == best_density &&
                                     (cand.start < best.start || (cand.start == best.start && cand.end < best.end)));
                if (better) {
                    found = true;
                    best = cand;
                    best_density = density;
                }
            }
        }
        if (!found) throw ContractViolation("no critical interval among the remaining jobs");
        const auto pieces = blocked.gaps(best);
        std::vector<Pending> inside;
        std::vector<const Job*> rest;
        for (const Job* j : remaining) {
            if (contains(best, j->life())) inside.push_back({j, j->work});
            else rest.push_back(j);
        }
        for (const auto& p : pieces) result.profile.segments.push_back({p, best_density});
        edf_allocate(std::move(inside), pieces, best_density, result.profile.allocation);
        result.profile.level_speeds.push_back(best_density);
        blocked.add(best);
        remaining = std::move(rest);
    }
    std::sort(result.profile.segments.begin(), result.profile.segments.end(),
              [](const SpeedSegment& a, const SpeedSegment& b) { return a.interval.start < b.interval.start; });
    std::sort(result.profile.allocation.begin(), result.profile.allocation.end(), [](const WorkPiece& a, const WorkPiece& b) {
        return std::tie(a.interval.start, a.job) < std::tie(b.interval.start, b.job);
    });
    result.energy = result.profile.energy(instance.alpha);
    return result;
}

namespace {

struct SubsetTable {
    std::vector<double> best;  ///< per subset, kInf when it does not fit
    std::vector<std::vector<Assignment>> plan;
};

/// Cheapest grid-aligned sequence for every job subset on processor p.
SubsetTable solve_processor(const ProblemView& view, int p, const LandmarkGrid& grid) {
    const int n = view.num_jobs();
    const std::size_t G = grid.size();
    const std::size_t subsets = std::size_t{1} << n;
    std::vector<double> t(G);
    for (std::size_t i = 0; i < G; ++i) t[i] = grid.points[i].to_double();

    struct JobTable {
        bool usable = false;
        std::size_t lo = 0, hi = 0;
        std::vector<double> cost;  ///< (a - lo) * width + (b - lo)
        std::size_t width = 0;
    };
    std::vector<JobTable> tables(n);
    for (int j = 0; j < n; ++j) {
        if (!view.runnable(p, j)) continue;
        const auto range = index_range(grid, view.window(p, j));
        if (!range) continue;
        auto& tab = tables[j];
        tab.usable = true;
        tab.lo = range->first;
        tab.hi = range->second;
        tab.width = tab.hi - tab.lo + 1;
        tab.cost.assign(tab.width * tab.width, kInf);
        const double w = view.work(p, j).to_double();
        for (std::size_t a = tab.lo; a < tab.hi; ++a)
            for (std::size_t b = a + 1; b <= tab.hi; ++b)
                tab.cost[(a - tab.lo) * tab.width + (b - tab.lo)] = energy_of_job(w, t[b] - t[a], view.alpha(p));
    }

    // f[S][e]: cheapest energy for S with every job finished by t[e].
    std::vector<double> f(subsets * G, kInf);
    struct Step {
        int job = -1;
        std::uint32_t start = 0;
    };
    std::vector<Step> step(subsets * G);
    std::vector<std::uint32_t> arg(subsets * G, 0);  // end index realising f[S][e]
    for (std::size_t e = 0; e < G; ++e) {
        f[e] = 0.0;
        arg[e] = static_cast<std::uint32_t>(e);
    }
    for (std::size_t S = 0; S < subsets; ++S) {
        double* row = &f[S * G];
        std::uint32_t* rarg = &arg[S * G];
        if (S != 0) {
            for (std::size_t e = 0; e < G; ++e) rarg[e] = static_cast<std::uint32_t>(e);
            for (std::size_t e = 1; e < G; ++e)
                if (row[e - 1] < row[e] || (row[e - 1] == row[e] && row[e - 1] < kInf)) {
                    row[e] = row[e - 1];
                    rarg[e] = rarg[e - 1];
                }
        }
        for (int j = 0; j < n; ++j) {
            if ((S >> j) & 1U) continue;
            const auto& tab = tables[j];
            if (!tab.usable) continue;
            const std::size_t T = S | (std::size_t{1} << j);
            double* next = &f[T * G];
            Step* nstep = &step[T * G];
            for (std::size_t a = tab.lo; a < tab.hi; ++a) {
                const double base = row[a];
                if (base == kInf) continue;
                const double* c = &tab.cost[(a - tab.lo) * tab.width];
                for (std::size_t b = a + 1; b <= tab.hi; ++b) {
                    const double v = base + c[b - tab.lo];
                    if (v < next[b]) {
                        next[b] = v;
                        nstep[b] = {j, static_cast<std::uint32_t>(a)};
                    }
                }
            }
        }
    }

    SubsetTable out;
    out.best.assign(subsets, kInf);
    out.plan.resize(subsets);
    for (std::size_t S = 0; S < subsets; ++S) {
        out.best[S] = f[S * G + G - 1];
        if (out.best[S] == kInf) continue;
        std::size_t cur = S, e = G - 1;
        while (cur != 0) {
            const std::size_t b = arg[cur * G + e];
            const Step s = step[cur * G + b];
            out.plan[S].push_back({view.job_id(s.job), view.processor_name(p), {grid.points[s.start], grid.points[b]}});
            cur &= ~(std::size_t{1} << s.job);
            e = s.start;
        }
    }
    return out;
}

BruteForceResult brute_force(const ProblemView& view, const LandmarkGrid& grid, const BruteForceOptions& options) {
    const int n = view.num_jobs();
    const int m = view.num_processors();
    if (n > 20) throw SizeLimitError("exhaustive search supports at most 20 jobs, got " + std::to_string(n));
    const std::size_t subsets = std::size_t{1} << n;
    const int distinct = view.identical_processors() ? 1 : m;
    std::uint64_t transitions = 0;
    for (int p = 0; p < distinct; ++p)
        for (int j = 0; j < n; ++j)
            if (view.runnable(p, j)) transitions += subsets * candidate_intervals(grid, view.window(p, j)).size();
    if (m > 1) {
        std::uint64_t pow3 = 1;
        for (int j = 0; j < n; ++j) pow3 *= 3;
        transitions += static_cast<std::uint64_t>(m) * pow3;
    }
    if (transitions > options.cap)
        throw SizeLimitError("exhaustive search needs " + std::to_string(transitions) + " transitions, above the cap of " +
                             std::to_string(options.cap));

    std::vector<SubsetTable> tables;
    for (int p = 0; p < distinct; ++p) tables.push_back(solve_processor(view, p, grid));
    auto table_of = [&](int p) -> const SubsetTable& { return tables[view.identical_processors() ? 0 : p]; };

    // h[k][S]: cheapest way to run S on processors 0..k-1; pick[k][S] is the subset given to processor k-1.
    std::vector<std::vector<double>> h(m + 1, std::vector<double>(subsets, kInf));
    std::vector<std::vector<std::size_t>> pick(m + 1, std::vector<std::size_t>(subsets, 0));
    h[0][0] = 0.0;
    for (int k = 1; k <= m; ++k) {
        const auto& best = table_of(k - 1).best;
        for (std::size_t S = 0; S < subsets; ++S) {
            // Submasks T of S in increasing order, the empty set first.
            std::size_t T = 0;
            while (true) {
                const double v = h[k - 1][S ^ T] + best[T];
                if (v < h[k][S]) {
                    h[k][S] = v;
                    pick[k][S] = T;
                }
                if (T == S) break;
                T = (T - S) & S;
            }
        }
    }
    const std::size_t all = subsets - 1;
    if (h[m][all] == kInf) {
        std::ostringstream os;
        os << "no non-preemptive schedule is aligned to the grid of " << grid.size() << " points";
        throw InfeasibleError(os.str());
    }
    BruteForceResult result;
    result.transitions = transitions;
    std::size_t S = all;
    for (int k = m; k >= 1; --k) {
        const std::size_t T = pick[k][S];
        for (const auto& a : table_of(k - 1).plan[T]) {
            Assignment copy = a;
            copy.processor = view.processor_name(k - 1);
            result.schedule.assignments.push_back(copy);
        }
        S ^= T;
    }
    result.schedule.sort();
    result.energy = energy_of_schedule(result.schedule, view);
    return result;
}

}  // namespace

BruteForceResult brute_force_nonpreemptive(const Instance& instance, const LandmarkGrid& grid, const BruteForceOptions& options) {
    instance.validate();
    return brute_force(ProblemView(instance), grid, options);
}

BruteForceResult brute_force_nonpreemptive(const HeterogeneousInstance& instance, const LandmarkGrid& grid, const BruteForceOptions& options) {
    instance.validate();
    return brute_force(ProblemView(instance), grid, options);
}

double generalized_bell(double alpha, double tolerance) {
    if (!(alpha > 1.0)) throw std::domain_error("generalized Bell numbers need alpha > 1");
    if (!(tolerance > 0.0)) throw std::domain_error("tolerance must be positive");
    // term(k) = k^(alpha-1) / k! * e^-1, evaluated in log space.
    auto log_term = [alpha](int k) { return (alpha - 1.0) * std::log(static_cast<double>(k)) - std::lgamma(k + 1.0) - 1.0; };
    long double sum = 0.0L;
    for (int k = 1; k < 100000; ++k) {
        sum += std::exp(static_cast<long double>(log_term(k)));
        const double next = std::exp(log_term(k + 1));
        // The ratio term(i+1)/term(i) = ((i+1)/i)^(alpha-1)/(i+1) decreases in i, so the tail is geometric.
        const double ratio = std::pow((k + 1.0) / k, alpha - 1.0) / (k + 1.0);
        if (ratio < 1.0 && next / (1.0 - ratio) < tolerance) return static_cast<double>(sum);
    }
    throw std::runtime_error("generalized Bell series did not converge");
}

}  // namespace speedscale
