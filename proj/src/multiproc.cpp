#include "speedscale/multiproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "speedscale/errors.hpp"
#include "speedscale/lp.hpp"
#include "speedscale/matching.hpp"

namespace speedscale {

namespace {

std::string window_id(int processor, int zone) { return "p" + std::to_string(processor + 1) + ".z" + std::to_string(zone + 1); }

GoodIndependentSet sorted_set(const Instance& instance, std::vector<int> ids) {
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        const Job& ja = instance.jobs[instance.index_of(a)];
        const Job& jb = instance.jobs[instance.index_of(b)];
        return std::tie(ja.deadline, ja.id) < std::tie(jb.deadline, jb.id);
    });
    GoodIndependentSet set;
    for (int id : ids) {
        set.jobs.push_back(id);
        set.deadlines.push_back(instance.jobs[instance.index_of(id)].deadline);
    }
    return set;
}

Rational overlap_length(const Interval& a, const Interval& b) {
    const Rational lo = max(a.start, b.start), hi = min(a.end, b.end);
    return lo < hi ? hi - lo : Rational(0);
}

std::map<int, Rational> durations_of(const SpeedProfile& profile) {
    std::map<int, Rational> d;
    for (const auto& piece : profile.allocation) d[piece.job] += piece.interval.length();
    return d;
}

std::vector<const Job*> deadline_order(const Instance& jobs) {
    std::vector<const Job*> order;
    for (const auto& j : jobs.jobs) order.push_back(&j);
    std::sort(order.begin(), order.end(), [](const Job* a, const Job* b) {
        return std::tie(a->deadline, a->release, a->id) < std::tie(b->deadline, b->release, b->id);
    });
    return order;
}

/// Earliest-start placement of `order` with every duration scaled by `f`; empty when a deadline is missed.
std::optional<Schedule> place(const std::vector<const Job*>& order, const std::map<int, Rational>& durations, const Rational& f,
                              const std::string& processor) {
    Schedule s;
    Rational cursor = order.empty() ? Rational(0) : order.front()->release;
    for (const Job* j : order) {
        const Rational start = max(cursor, j->release);
        const Rational end = start + durations.at(j->id) * f;
        if (end > j->deadline) return std::nullopt;
        s.assignments.push_back({j->id, processor, {start, end}});
        cursor = end;
    }
    return s;
}

bool fits(const std::vector<const Job*>& order, const std::vector<double>& durations, double f) {
    double cursor = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < order.size(); ++k) {
        const double start = std::max(cursor, order[k]->release.to_double());
        cursor = start + durations[k] * f;
        if (cursor > order[k]->deadline.to_double() * (1 + 1e-15) + 1e-15) return false;
    }
    return true;
}

}  // namespace

ZonePartition greedy_independent_sets(const Instance& instance) {
    instance.validate();
    ZonePartition out;
    std::vector<Job> remaining = instance.jobs;
    for (int i = 0; i < instance.processors; ++i) {
        GoodIndependentSet set = remaining.empty() ? GoodIndependentSet{} : good_independent_set(remaining);
        std::set<int> taken(set.jobs.begin(), set.jobs.end());
        std::erase_if(remaining, [&](const Job& j) { return taken.count(j.id) > 0; });
        out.zones.push_back(zones_of(set, instance.jobs));
        out.sets.push_back(std::move(set));
    }
    for (const auto& j : remaining) out.residue.push_back(j.id);
    std::sort(out.residue.begin(), out.residue.end());
    return out;
}

ZonePartition make_zone_partition(const Instance& instance, const std::vector<std::vector<int>>& sets) {
    instance.validate();
    if (static_cast<int>(sets.size()) > instance.processors)
        throw std::domain_error("more sets than processors: " + std::to_string(sets.size()) + " > " + std::to_string(instance.processors));
    std::set<int> seen;
    ZonePartition out;
    for (const auto& ids : sets) {
        for (int id : ids) {
            (void)instance.index_of(id);
            if (!seen.insert(id).second) throw std::domain_error("job " + std::to_string(id) + " appears in two sets");
        }
        for (std::size_t a = 0; a < ids.size(); ++a)
            for (std::size_t b = a + 1; b < ids.size(); ++b)
                if (interiors_intersect(instance.jobs[instance.index_of(ids[a])].life(), instance.jobs[instance.index_of(ids[b])].life()))
                    throw std::domain_error("jobs " + std::to_string(ids[a]) + " and " + std::to_string(ids[b]) + " are not independent");
        out.sets.push_back(sorted_set(instance, ids));
    }
    while (static_cast<int>(out.sets.size()) < instance.processors) out.sets.emplace_back();
    for (const auto& set : out.sets) out.zones.push_back(zones_of(set, instance.jobs));
    for (const auto& j : instance.jobs)
        if (!seen.count(j.id)) out.residue.push_back(j.id);
    std::sort(out.residue.begin(), out.residue.end());
    return out;
}

WindowInstance build_heterogeneous_instance(const Instance& instance, const ZonePartition& partition) {
    instance.validate();
    WindowInstance out;
    out.instance.alpha = instance.alpha;
    for (std::size_t i = 0; i < partition.zones.size(); ++i)
        for (std::size_t l = 0; l < partition.zones[i].size(); ++l) {
            const int pi = static_cast<int>(i), zl = static_cast<int>(l);
            out.windows.push_back({pi, zl, partition.zones[i][l], window_id(pi, zl)});
            out.instance.processors.push_back({window_id(pi, zl), instance.alpha});
        }
    for (const auto& job : instance.jobs) {
        HeterogeneousJob h;
        h.id = job.id;
        h.life = job.life();
        for (const auto& w : out.windows) {
            if (!interiors_intersect(job.life(), w.interval)) continue;
            const Rational origin = w.interval.start;
            h.work[w.id] = job.work;
            h.life_per_processor[w.id] = {max(job.release - origin, Rational(0)), min(job.deadline - origin, w.interval.length())};
        }
        out.instance.jobs.push_back(std::move(h));
    }
    out.instance.validate();
    return out;
}

std::string to_string(WindowStrategy strategy) { return strategy == WindowStrategy::kLp ? "lp" : "greedy"; }

WindowStrategy parse_window_strategy(const std::string& name) {
    if (name == "lp") return WindowStrategy::kLp;
    if (name == "greedy") return WindowStrategy::kGreedy;
    throw std::invalid_argument("unknown window strategy '" + name + "' (expected lp or greedy)");
}

WindowAssignment solve_windows(const WindowInstance& windows, WindowStrategy strategy) {
    const auto& het = windows.instance;
    het.validate();
    const int K = static_cast<int>(windows.windows.size());
    struct Option {
        int job;  ///< index into het.jobs
        int window;
        double duration;  ///< clipped window length
        double cost;      ///< energy when run alone over the clipped window
    };
    std::vector<Option> options;
    std::vector<double> window_length(K);
    for (int k = 0; k < K; ++k) window_length[k] = windows.windows[k].interval.length().to_double();
    for (std::size_t j = 0; j < het.jobs.size(); ++j)
        for (int k = 0; k < K; ++k) {
            const auto& id = windows.windows[k].id;
            const auto it = het.jobs[j].work.find(id);
            if (it == het.jobs[j].work.end()) continue;
            const Interval clip = het.jobs[j].life_on(id);
            options.push_back({static_cast<int>(j), k, clip.length().to_double(), energy_of_job(it->second, clip.length(), het.alpha)});
        }

    WindowAssignment out;
    std::vector<int> chosen(het.jobs.size(), -1);
    if (strategy == WindowStrategy::kGreedy) {
        std::vector<double> load(K, 0.0);
        std::vector<std::size_t> order(het.jobs.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::tie(het.jobs[a].life.end, het.jobs[a].id) < std::tie(het.jobs[b].life.end, het.jobs[b].id);
        });
        for (std::size_t j : order) {
            const Option* best = nullptr;
            double best_load = 0.0;
            for (const auto& o : options) {
                if (o.job != static_cast<int>(j)) continue;
                const double l = (load[o.window] + o.duration) / window_length[o.window];
                if (!best || l < best_load) {
                    best = &o;
                    best_load = l;
                }
            }
            chosen[j] = best->window;
            load[best->window] += best->duration;
        }
    } else {
        // Stage 1: smallest uniform congestion kappa with sum_j duration * x <= kappa |W|.
        // Stage 2: cheapest assignment under that congestion.
        const int V = static_cast<int>(options.size());
        double max_cost = 0.0;
        for (const auto& o : options) max_cost = std::max(max_cost, o.cost);
        auto build = [&](bool congestion_stage, double kappa) {
            LinearProgram lp;
            for (const auto& o : options) lp.add_variable(congestion_stage ? 0.0 : o.cost / max_cost);
            const int kappa_var = congestion_stage ? lp.add_variable(1.0) : -1;
            for (std::size_t j = 0; j < het.jobs.size(); ++j) {
                std::vector<LinearProgram::Term> terms;
                for (int v = 0; v < V; ++v)
                    if (options[v].job == static_cast<int>(j)) terms.push_back({v, 1.0});
                lp.add_row(std::move(terms), Relation::kEqual, 1.0);
            }
            for (int k = 0; k < K; ++k) {
                std::vector<LinearProgram::Term> terms;
                for (int v = 0; v < V; ++v)
                    if (options[v].window == k) terms.push_back({v, options[v].duration / window_length[k]});
                if (terms.empty()) continue;
                if (congestion_stage) {
                    terms.push_back({kappa_var, -1.0});
                    lp.add_row(std::move(terms), Relation::kLessEqual, 0.0);
                } else {
                    lp.add_row(std::move(terms), Relation::kLessEqual, kappa);
                }
            }
            return lp;
        };
        const LpSolution first = solve_lp(build(true, 0.0));
        if (first.status != LpStatus::kOptimal) throw ContractViolation("window congestion LP: " + to_string(first.status));
        out.congestion = first.objective;
        const LpSolution second = solve_lp(build(false, first.objective * (1 + 1e-6) + 1e-9));
        if (second.status != LpStatus::kOptimal) throw ContractViolation("window assignment LP: " + to_string(second.status));
        out.fractional_cost = second.objective * max_cost;

        // Copies per window, items by decreasing duration, as in the single-processor rounding.
        std::vector<BipartiteEdge> edges;
        int right = 0;
        for (int k = 0; k < K; ++k) {
            std::vector<int> items;
            double total = 0.0;
            for (int v = 0; v < V; ++v)
                if (options[v].window == k && second.values[v] > 1e-9) {
                    items.push_back(v);
                    total += second.values[v];
                }
            if (items.empty()) continue;
            std::sort(items.begin(), items.end(), [&](int a, int b) {
                if (options[a].duration != options[b].duration) return options[a].duration > options[b].duration;
                return het.jobs[options[a].job].id < het.jobs[options[b].job].id;
            });
            const int copies = std::max(1, static_cast<int>(std::ceil(total - 1e-9)));
            double prefix = 0.0;
            for (int v : items) {
                const double lo = prefix, hi = prefix + second.values[v];
                prefix = hi;
                const int first_copy = std::min(copies, static_cast<int>(std::floor(lo + 1e-9)) + 1);
                const int last_copy = std::min(copies, std::max(first_copy, static_cast<int>(std::ceil(hi - 1e-9))));
                for (int c = first_copy; c <= last_copy; ++c) edges.push_back({options[v].job, right + c - 1, options[v].cost});
            }
            right += copies;
        }
        const auto matching = min_cost_left_saturating_matching(static_cast<int>(het.jobs.size()), right, edges);
        // Recover the window of each matched copy.
        std::vector<int> window_of_right;
        for (int k = 0; k < K; ++k) {
            double total = 0.0;
            for (int v = 0; v < V; ++v)
                if (options[v].window == k && second.values[v] > 1e-9) total += second.values[v];
            if (total == 0.0) continue;
            const int copies = std::max(1, static_cast<int>(std::ceil(total - 1e-9)));
            for (int c = 0; c < copies; ++c) window_of_right.push_back(k);
        }
        for (std::size_t j = 0; j < het.jobs.size(); ++j) chosen[j] = window_of_right[edges[matching.match[j]].right];
    }

    std::vector<Instance> subs(K);
    for (int k = 0; k < K; ++k) {
        subs[k].alpha = het.alpha;
        subs[k].processors = 1;
    }
    for (std::size_t j = 0; j < het.jobs.size(); ++j) {
        const int k = chosen[j];
        const auto& id = windows.windows[k].id;
        const Interval clip = het.jobs[j].life_on(id);
        subs[k].jobs.push_back({het.jobs[j].id, clip.start, clip.end, het.jobs[j].work.at(id)});
        out.window_of_job[het.jobs[j].id] = k;
    }
    for (int k = 0; k < K; ++k) {
        if (subs[k].jobs.empty()) continue;
        std::sort(subs[k].jobs.begin(), subs[k].jobs.end(), [](const Job& a, const Job& b) { return a.id < b.id; });
        WindowPlan plan{k, subs[k], yds_preemptive(subs[k])};
        out.energy += plan.yds.energy;
        out.plans.push_back(std::move(plan));
    }
    return out;
}

Schedule edf_reorder(const Instance& window_jobs, const SpeedProfile& profile, const std::string& processor) {
    const auto durations = durations_of(profile);
    const auto order = deadline_order(window_jobs);
    for (const Job* j : order)
        if (!durations.count(j->id)) throw ContractViolation("job " + std::to_string(j->id) + " has no preemptive allocation");
    auto s = place(order, durations, Rational(1), processor);
    if (!s) {
        std::ostringstream os;
        os << "deadline-ordered placement misses a deadline in a window with " << order.size() << " jobs";
        throw ContractViolation(os.str());
    }
    return *s;
}

Repack repack_window(const Instance& window_jobs, const SpeedProfile& profile, const std::string& processor) {
    const auto durations = durations_of(profile);
    const auto edf = deadline_order(window_jobs);
    std::vector<std::vector<const Job*>> orders{edf};
    if (edf.size() <= 7) {
        std::vector<const Job*> perm = edf;
        std::sort(perm.begin(), perm.end(), [](const Job* a, const Job* b) { return a->id < b->id; });
        do {
            if (perm != edf) orders.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end(), [](const Job* a, const Job* b) { return a->id < b->id; }));
    }
    constexpr std::int64_t kSteps = 1 << 16;
    Repack best;
    best.shrink = -1.0;
    for (const auto& order : orders) {
        std::vector<double> d;
        for (const Job* j : order) d.push_back(durations.at(j->id).to_double());
        double f = 1.0;
        if (!fits(order, d, 1.0)) {
            double lo = 0.0, hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = (lo + hi) / 2;
                (fits(order, d, mid) ? lo : hi) = mid;
            }
            f = lo;
        }
        if (f <= best.shrink) continue;
        // Exact placement on a dyadic factor at or below f.
        for (std::int64_t step = static_cast<std::int64_t>(std::floor(f * kSteps)); step > 0; --step) {
            const Rational fr(step, kSteps);
            if (auto s = place(order, durations, fr, processor)) {
                if (fr.to_double() > best.shrink) {
                    best.schedule = std::move(*s);
                    best.shrink = fr.to_double();
                    best.order.clear();
                    for (const Job* j : order) best.order.push_back(j->id);
                }
                break;
            }
        }
    }
    if (best.shrink <= 0.0) throw ContractViolation("no job order fits the window");
    return best;
}

MultiprocResult schedule_multiproc(const Instance& instance, WindowStrategy strategy) {
    instance.validate();
    MultiprocResult out;
    out.partition = greedy_independent_sets(instance);
    out.windows = build_heterogeneous_instance(instance, out.partition);
    out.assignment = solve_windows(out.windows, strategy);
    out.window_energy = out.assignment.energy;
    for (const auto& plan : out.assignment.plans) {
        const Window& w = out.windows.windows[plan.window];
        const std::string processor = Instance::processor_name(w.processor);
        Schedule local;
        try {
            local = edf_reorder(plan.jobs, plan.yds.profile, processor);
        } catch (const ContractViolation&) {
            Repack r = repack_window(plan.jobs, plan.yds.profile, processor);
            ++out.repacked_windows;
            out.worst_shrink = std::min(out.worst_shrink, r.shrink);
            local = std::move(r.schedule);
        }
        for (auto a : local.assignments) {
            a.interval = {a.interval.start + w.interval.start, a.interval.end + w.interval.start};
            out.schedule.assignments.push_back(a);
        }
    }
    out.schedule.sort();
    out.energy = energy_of_schedule(out.schedule, instance);
    return out;
}

std::string to_string(MoveKind kind) {
    switch (kind) {
        case MoveKind::kPaired: return "paired";
        case MoveKind::kPartner: return "partner";
        case MoveKind::kMiddleFifth: return "middle-fifth";
        case MoveKind::kCut: return "cut";
    }
    return "unknown";
}

TransformResult transform_assign_to_processors(const Schedule& schedule, const Instance& instance, const std::vector<std::vector<int>>& sets) {
    if (const auto v = validate_schedule(schedule, instance); !v.empty())
        throw std::domain_error("input schedule is invalid: " + v.front().message);
    const ZonePartition partition = make_zone_partition(instance, sets);
    std::map<int, int> target;
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (int id : sets[i]) target[id] = static_cast<int>(i);
    std::map<int, Assignment> current;
    for (const auto& a : schedule.assignments) current[a.job] = a;
    auto work = [&](int id) { return instance.jobs[instance.index_of(id)].work; };
    auto energy = [&](int id, const Interval& iv) { return energy_of_job(work(id), iv.length(), instance.alpha); };
    // A job targeted at another processor leaves processor i, so it neither blocks nor pairs there.
    auto stays_on = [&](int id, int i) {
        const auto it = target.find(id);
        return it == target.end() || it->second == i;
    };

    TransformResult out;
    for (std::size_t si = 0; si < partition.sets.size(); ++si) {
        const int i = static_cast<int>(si);
        const std::string proc = Instance::processor_name(i);
        for (int j : partition.sets[si].jobs) {
            Assignment& aj = current.at(j);
            if (aj.processor == proc) continue;
            const Interval Ij = aj.interval;
            int partner = 0;
            Rational best_overlap = 0;
            for (const auto& [id, a] : current) {
                if (id == j || a.processor != proc || !stays_on(id, i)) continue;
                const Rational ov = overlap_length(Ij, a.interval);
                if (ov == 0 || ov * 5 < min(Ij.length(), a.interval.length()) * 2) continue;
                if (ov > best_overlap) {
                    best_overlap = ov;
                    partner = id;
                }
            }
            TransformStep step{j, MoveKind::kPaired, partner, Ij, Ij, aj.processor, proc, energy(j, Ij), 0.0};
            if (partner != 0) {
                Assignment& ap = current.at(partner);
                const Interval shared{max(Ij.start, ap.interval.start), min(Ij.end, ap.interval.end)};
                const Rational cut = shared.start + shared.length() * work(j) / (work(j) + work(partner));
                TransformStep pstep{partner, MoveKind::kPartner, j, ap.interval, {cut, shared.end}, proc, proc, energy(partner, ap.interval), 0.0};
                step.after = {shared.start, cut};
                ap.interval = pstep.after;
                pstep.energy_after = energy(partner, pstep.after);
                out.steps.push_back(pstep);
            } else {
                step.kind = MoveKind::kMiddleFifth;
                step.after = {Ij.start + Ij.length() * Rational(2, 5), Ij.start + Ij.length() * Rational(3, 5)};
                for (const auto& [id, a] : current)
                    if (id != j && a.processor == proc && stays_on(id, i) && interiors_intersect(a.interval, step.after))
                        throw ContractViolation("middle fifth of job " + std::to_string(j) + " is busy on " + proc + " (job " +
                                                std::to_string(id) + ")");
            }
            aj.processor = proc;
            aj.interval = step.after;
            step.energy_after = energy(j, step.after);
            out.steps.push_back(step);
        }
    }
    for (const auto& [id, a] : current) out.schedule.assignments.push_back(a);
    out.schedule.sort();
    if (const auto v = validate_schedule(out.schedule, instance); !v.empty())
        throw ContractViolation("reassigned schedule is invalid: " + v.front().message);
    return out;
}

TransformResult cut_at_zone_boundaries(const Schedule& schedule, const Instance& instance, const ZonePartition& partition) {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < partition.sets.size(); ++i) index[Instance::processor_name(static_cast<int>(i))] = static_cast<int>(i);
    for (std::size_t i = 0; i < partition.sets.size(); ++i)
        for (int id : partition.sets[i].jobs) {
            const Assignment* a = schedule.find(id);
            if (!a || a->processor != Instance::processor_name(static_cast<int>(i)))
                throw std::domain_error("job " + std::to_string(id) + " is not on processor " + Instance::processor_name(static_cast<int>(i)));
        }
    TransformResult out;
    for (auto a : schedule.assignments) {
        const auto it = index.find(a.processor);
        if (it != index.end()) {
            std::vector<Rational> crossed;
            for (const auto& d : partition.sets[it->second].deadlines)
                if (interior_contains(a.interval, d)) crossed.push_back(d);
            if (crossed.size() > 1)
                throw ContractViolation("job " + std::to_string(a.job) + " on " + a.processor + " crosses " + std::to_string(crossed.size()) +
                                        " zone boundaries");
            if (crossed.size() == 1) {
                const Interval left{a.interval.start, crossed[0]}, right{crossed[0], a.interval.end};
                const Interval kept = left.length() >= right.length() ? left : right;
                const Rational w = instance.jobs[instance.index_of(a.job)].work;
                out.steps.push_back({a.job, MoveKind::kCut, 0, a.interval, kept, a.processor, a.processor,
                                     energy_of_job(w, a.interval.length(), instance.alpha), energy_of_job(w, kept.length(), instance.alpha)});
                a.interval = kept;
            }
        }
        out.schedule.assignments.push_back(a);
    }
    out.schedule.sort();
    if (const auto v = validate_schedule(out.schedule, instance); !v.empty())
        throw ContractViolation("cut schedule is invalid: " + v.front().message);
    return out;
}

double transform_bound(const Instance& instance) {
    const double ratio = (instance.max_work() / instance.min_work()).to_double();
    return std::pow(2.5, instance.alpha - 1) * std::pow(1 + ratio, instance.alpha);
}

double approximation_constant(const Instance& instance, double epsilon) {
    const double a = instance.alpha;
    const double bell = generalized_bell(a);
    if (instance.max_work() == instance.min_work()) return 2 * (1 + epsilon) * std::pow(5 * (1 + epsilon), a - 1) * bell;
    const double ratio = (instance.max_work() / instance.min_work()).to_double();
    return std::pow(2.5, a - 1) * bell * std::pow((1 + epsilon) * (1 + ratio), a);
}

}  // namespace speedscale
