#include "speedscale/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "speedscale/errors.hpp"
#include "speedscale/matching.hpp"

namespace speedscale {

namespace {

const Job& find_job(std::span<const Job> jobs, int id) {
    for (const auto& j : jobs)
        if (j.id == id) return j;
    throw std::domain_error("unknown job id " + std::to_string(id));
}

Rational pow2_fraction(int depth) {
    if (depth < 0 || depth > 62) throw std::overflow_error("subzone depth out of range");
    return Rational(1, std::int64_t{1} << depth);
}

std::string str(const Interval& iv) {
    std::ostringstream os;
    os << "[" << iv.start << ", " << iv.end << "]";
    return os.str();
}

// Index of the zone holding `iv`, or -1.
int zone_holding(const std::vector<Interval>& zones, const Interval& iv) {
    auto it = std::upper_bound(zones.begin(), zones.end(), iv.start, [](const Rational& t, const Interval& z) { return t < z.end; });
    // `it` is the first zone ending after iv.start; an interval starting at a zone's end belongs to the next zone.
    if (it == zones.end()) return -1;
    if (it->start <= iv.start && iv.end <= it->end) return static_cast<int>(it - zones.begin());
    return -1;
}

}  // namespace

GoodIndependentSet good_independent_set(std::span<const Job> jobs) {
    std::vector<const Job*> order;
    for (const auto& j : jobs) order.push_back(&j);
    std::sort(order.begin(), order.end(), [](const Job* a, const Job* b) {
        return std::tie(a->deadline, a->id) < std::tie(b->deadline, b->id);
    });
    GoodIndependentSet set;
    for (const Job* j : order) {
        if (!set.deadlines.empty() && j->release < set.deadlines.back()) continue;
        set.jobs.push_back(j->id);
        set.deadlines.push_back(j->deadline);
    }
    return set;
}

bool is_good(const GoodIndependentSet& set, std::span<const Job> jobs) {
    if (set.jobs.size() != set.deadlines.size()) throw std::domain_error("independent set has mismatched deadlines");
    std::vector<Interval> lives;
    for (std::size_t k = 0; k < set.jobs.size(); ++k) {
        const Job& j = find_job(jobs, set.jobs[k]);
        if (j.deadline != set.deadlines[k]) throw std::domain_error("independent set deadline does not match job " + std::to_string(j.id));
        lives.push_back(j.life());
    }
    for (std::size_t a = 0; a < lives.size(); ++a)
        for (std::size_t b = a + 1; b < lives.size(); ++b)
            if (interiors_intersect(lives[a], lives[b]))
                throw std::domain_error("jobs " + std::to_string(set.jobs[a]) + " and " + std::to_string(set.jobs[b]) + " are not independent");
    auto deadlines = set.deadlines;
    std::sort(deadlines.begin(), deadlines.end());
    for (const auto& j : jobs) {
        // Index of the first deadline >= release: the job lies strictly between
        // the deadline before it and the next one unless it reaches that next one.
        const auto it = std::upper_bound(deadlines.begin(), deadlines.end(), j.release);
        const bool after_previous = it == deadlines.begin() || *(it - 1) < j.release;
        const bool before_next = it == deadlines.end() || j.deadline < *it;
        if (after_previous && before_next) return false;
    }
    return true;
}

std::vector<Interval> zones_of(const GoodIndependentSet& set, std::span<const Job> jobs) {
    if (jobs.empty()) return {};
    Rational lo = jobs.front().release, hi = jobs.front().deadline;
    for (const auto& j : jobs) {
        lo = min(lo, j.release);
        hi = max(hi, j.deadline);
    }
    std::vector<Rational> cuts{lo};
    for (const auto& d : set.deadlines)
        if (d > cuts.back() && d < hi) cuts.push_back(d);
    cuts.push_back(hi);
    std::vector<Interval> zones;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) zones.push_back({cuts[k], cuts[k + 1]});
    return zones;
}

FractionalSolution split_at_deadlines(const FractionalSolution& x, const GoodIndependentSet& set) {
    FractionalSolution y;
    y.alpha = x.alpha;
    for (const auto& [key, value] : x.values) {
        const auto& [job, iv] = key;
        const Rational* crossed = nullptr;
        for (const auto& d : set.deadlines) {
            if (!interior_contains(iv, d)) continue;
            if (crossed)
                throw ContractViolation("support interval " + str(iv) + " of job " + std::to_string(job) +
                                        " crosses two deadlines of the independent set; the point-load constraint is violated");
            crossed = &d;
        }
        if (!crossed) {
            y.add(job, iv, value);
            continue;
        }
        const Interval left{iv.start, *crossed}, right{*crossed, iv.end};
        y.add(job, left.length() >= right.length() ? left : right, value);
    }
    return y;
}

Interval Subzone::interval() const {
    const Rational len = zone_interval.length() * pow2_fraction(depth);
    if (side == ZoneSide::kStart) return {zone_interval.start, zone_interval.start + len};
    return {zone_interval.end - len, zone_interval.end};
}

bool operator<(const Subzone& a, const Subzone& b) {
    return std::make_tuple(a.zone, a.side, a.depth) < std::make_tuple(b.zone, b.side, b.depth);
}

std::string to_string(const Subzone& z) {
    std::ostringstream os;
    os << "zone " << z.zone << " " << (z.side == ZoneSide::kStart ? "start" : "end") << " depth " << z.depth << " " << str(z.interval());
    return os.str();
}

CompressedSolution compress_to_subzones(const FractionalSolution& y, std::span<const Job> jobs, const GoodIndependentSet& set) {
    const auto zones = zones_of(set, jobs);
    CompressedSolution out;
    out.z.alpha = y.alpha;
    for (const auto& [key, value] : y.values) {
        const auto& [job_id, iv] = key;
        const Job& job = find_job(jobs, job_id);
        const int zi = zone_holding(zones, iv);
        if (zi < 0) throw ContractViolation("support interval " + str(iv) + " of job " + std::to_string(job_id) + " is not inside one zone");
        const Interval& zone = zones[zi];
        const Rational gap = zone.length();
        Subzone sz{zi, zone, ZoneSide::kStart, 1};
        Interval moved;
        Rational reach;  // distance from the anchor to the far end of the moved interval
        if (job.release <= zone.start) {
            moved = {(iv.start + zone.start) / 2, (iv.end + zone.start) / 2};
            reach = moved.end - zone.start;
        } else if (job.deadline >= zone.end) {
            sz.side = ZoneSide::kEnd;
            moved = {(iv.start + zone.end) / 2, (iv.end + zone.end) / 2};
            reach = zone.end - moved.start;
        } else {
            throw ContractViolation("life interval of job " + std::to_string(job_id) + " lies strictly inside zone " + str(zone) +
                                    "; the independent set is not good");
        }
        while (reach <= gap * pow2_fraction(sz.depth + 1)) ++sz.depth;
        if (!contains(job.life(), sz.interval()))
            throw ContractViolation("subzone " + to_string(sz) + " is not inside the life interval of job " + std::to_string(job_id));
        out.z.add(job_id, moved, value);
        out.items.push_back({job_id, moved, value, sz});
    }
    return out;
}

AssignmentGraph build_assignment_graph(const CompressedSolution& z, std::span<const Job> jobs, double alpha) {
    constexpr double kSlotTol = 1e-9;
    AssignmentGraph g;
    std::map<int, int> left_of;
    std::vector<int> ids;
    for (const auto& j : jobs) ids.push_back(j.id);
    std::sort(ids.begin(), ids.end());
    for (int id : ids) {
        left_of[id] = static_cast<int>(g.left_jobs.size());
        g.left_jobs.push_back(id);
    }

    std::map<Subzone, std::vector<const CompressedItem*>> by_subzone;
    for (const auto& item : z.items) by_subzone[item.subzone].push_back(&item);
    for (auto& [sz, items] : by_subzone) {
        std::sort(items.begin(), items.end(), [](const CompressedItem* a, const CompressedItem* b) {
            const Rational la = a->interval.length(), lb = b->interval.length();
            if (la != lb) return la > lb;
            return std::tie(a->job, a->interval) < std::tie(b->job, b->interval);
        });
        double total = 0.0;
        for (const auto* it : items) total += it->mass;
        const int copies = std::max(1, static_cast<int>(std::ceil(total - kSlotTol)));
        const int base = static_cast<int>(g.right.size());
        for (int c = 1; c <= copies; ++c) g.right.push_back({sz, c});
        double prefix = 0.0;
        for (const auto* it : items) {
            const double lo = prefix, hi = prefix + it->mass;
            prefix = hi;
            const int first = static_cast<int>(std::floor(lo + kSlotTol)) + 1;
            const int last = std::min(copies, std::max(first, static_cast<int>(std::ceil(hi - kSlotTol))));
            const Job& job = find_job(jobs, it->job);
            const double weight = energy_of_job(job.work, it->interval.length(), alpha);
            for (int c = std::min(first, copies); c <= last; ++c) {
                const double share = std::max(0.0, std::min(hi, static_cast<double>(c)) - std::max(lo, static_cast<double>(c - 1)));
                g.edges.push_back({it->job, left_of.at(it->job), base + c - 1, weight, it->interval.length(), share});
                g.fractional_weight += share * weight;
            }
        }
    }
    return g;
}

GraphMatching min_weight_saturating_matching(const AssignmentGraph& graph) {
    std::vector<BipartiteEdge> edges;
    edges.reserve(graph.edges.size());
    for (const auto& e : graph.edges) edges.push_back({e.left, e.right, e.weight});
    const auto m = min_cost_left_saturating_matching(static_cast<int>(graph.left_jobs.size()), static_cast<int>(graph.right.size()), edges);
    return {m.match, m.cost};
}

PlacedSchedule matching_to_schedule(const GraphMatching& matching, const AssignmentGraph& graph, const CompressedSolution& z,
                                    std::span<const Job> jobs, const std::string& processor) {
    struct Piece {
        int job;
        Rational length;
    };
    // (zone, side) -> depth -> matched pieces.
    std::map<std::pair<int, ZoneSide>, std::map<int, std::vector<Piece>, std::greater<>>> groups;
    std::map<Subzone, SubzonePacking> packing;
    for (const auto& rv : graph.right) {
        auto& p = packing[rv.subzone];
        p.subzone = rv.subzone;
        p.size = rv.subzone.interval().length();
        groups[{rv.subzone.zone, rv.subzone.side}][rv.subzone.depth];
    }
    for (const auto& item : z.items) packing[item.subzone].fractional_length += item.mass * item.interval.length().to_double();
    if (matching.edge_of_left.size() != graph.left_jobs.size()) throw ContractViolation("matching does not cover every job");
    for (int e : matching.edge_of_left) {
        const auto& edge = graph.edges.at(e);
        const Subzone& sz = graph.right.at(edge.right).subzone;
        packing[sz].matched_length += edge.length;
        groups[{sz.zone, sz.side}][sz.depth].push_back({edge.job, edge.length / 3});
    }

    PlacedSchedule out;
    for (auto& [key, by_depth] : groups) {
        const auto [zone, side] = key;
        Interval zone_iv;
        for (const auto& rv : graph.right)
            if (rv.subzone.zone == zone) zone_iv = rv.subzone.zone_interval;
        Rational used = 0;
        for (auto& [depth, pieces] : by_depth) {
            std::sort(pieces.begin(), pieces.end(), [&](const Piece& a, const Piece& b) {
                const Job& ja = find_job(jobs, a.job);
                const Job& jb = find_job(jobs, b.job);
                if (side == ZoneSide::kStart) return std::tie(ja.deadline, ja.id) < std::tie(jb.deadline, jb.id);
                if (ja.release != jb.release) return ja.release > jb.release;
                return ja.id < jb.id;
            });
            for (const auto& piece : pieces) {
                Interval iv;
                if (side == ZoneSide::kStart) iv = {zone_iv.start + used, zone_iv.start + used + piece.length};
                else iv = {zone_iv.end - used - piece.length, zone_iv.end - used};
                used += piece.length;
                out.schedule.assignments.push_back({piece.job, processor, iv});
            }
            const Subzone sz{zone, zone_iv, side, depth};
            auto& p = packing[sz];
            p.placed = used;
            if (used > p.size) {
                std::ostringstream os;
                os << "packing failed in " << to_string(sz) << ": placed " << used << " > |Z| = " << p.size << " (l(Z) = " << p.matched_length
                   << ", v(Z) = " << p.fractional_length << ")";
                throw ContractViolation(os.str());
            }
        }
    }
    for (auto& [sz, p] : packing) out.packing.push_back(p);
    out.schedule.sort();
    return out;
}

RoundingReport round_solution(const FractionalSolution& x, const Instance& instance, const RoundingOptions& options) {
    instance.validate();
    if (instance.processors != 1) throw std::domain_error("the rounding pipeline is defined for one processor");
    const std::span<const Job> jobs(instance.jobs);
    RoundingReport r;
    r.energy_input = fractional_energy(x, instance);

    r.x.alpha = instance.alpha;
    std::map<int, double> mass;
    for (const auto& [key, v] : x.values)
        if (v > options.drop_below) mass[key.first] += v;
    for (const auto& j : instance.jobs)
        if (mass[j.id] < 1.0 - 1e-6)
            throw ContractViolation("job " + std::to_string(j.id) + " has fractional mass " + std::to_string(mass[j.id]) + " < 1");
    for (const auto& [key, v] : x.values)
        if (v > options.drop_below) r.x.add(key.first, key.second, v / mass.at(key.first));

    r.independent_set = good_independent_set(jobs);
    if (!is_good(r.independent_set, jobs)) throw ContractViolation("greedy independent set is not good");
    r.y = split_at_deadlines(r.x, r.independent_set);
    r.z = compress_to_subzones(r.y, jobs, r.independent_set);
    r.graph = build_assignment_graph(r.z, jobs, instance.alpha);
    r.matching = min_weight_saturating_matching(r.graph);
    r.placed = matching_to_schedule(r.matching, r.graph, r.z, jobs, Instance::processor_name(0));

    r.energy_x = fractional_energy(r.x, instance);
    r.energy_y = fractional_energy(r.y, instance);
    r.energy_z = fractional_energy(r.z.z, instance);
    r.matching_weight = r.matching.weight;
    r.energy_final = energy_of_schedule(r.placed.schedule, instance);
    if (options.check_constraints) {
        r.constraints_y = check_lp1_constraints(r.y, instance, true);
        r.constraints_z = check_lp1_constraints(r.z.z, instance, true);
    }
    return r;
}

}  // namespace speedscale
