#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "speedscale/instance.hpp"
#include "speedscale/lp1.hpp"

namespace speedscale {

/// Pairwise interior-disjoint jobs in increasing deadline order.
struct GoodIndependentSet {
    std::vector<int> jobs;  ///< job ids
    std::vector<Rational> deadlines;
};

/// Earliest-deadline greedy: repeatedly takes the remaining job with the
/// smallest deadline (ties by id) that starts no earlier than the last pick.
GoodIndependentSet good_independent_set(std::span<const Job> jobs);

/// True when no life interval lies strictly between two consecutive deadlines
/// (with sentinels at minus and plus infinity). Throws std::domain_error when
/// the set is not independent or names an unknown job.
bool is_good(const GoodIndependentSet& set, std::span<const Job> jobs);

/// Intervals between consecutive deadlines of the set, with the outer two
/// clipped to [min release, max deadline]. Empty zones are dropped.
std::vector<Interval> zones_of(const GoodIndependentSet& set, std::span<const Job> jobs);

/// Moves every support interval that crosses a deadline of the set onto its
/// longer side (the left side on ties). Throws ContractViolation when an
/// interval crosses two deadlines.
FractionalSolution split_at_deadlines(const FractionalSolution& x, const GoodIndependentSet& set);

enum class ZoneSide { kStart, kEnd };

/// [d_s, d_s + gap/2^depth] (start side) or [d_e - gap/2^depth, d_e] (end side).
struct Subzone {
    int zone = 0;
    Interval zone_interval;
    ZoneSide side = ZoneSide::kStart;
    int depth = 1;

    [[nodiscard]] Interval interval() const;
    friend bool operator==(const Subzone& a, const Subzone& b) { return a.zone == b.zone && a.side == b.side && a.depth == b.depth; }
    friend bool operator<(const Subzone& a, const Subzone& b);
};

std::string to_string(const Subzone& z);

struct CompressedItem {
    int job = 0;  ///< job id
    Interval interval;
    double mass = 0.0;
    Subzone subzone;
};

struct CompressedSolution {
    FractionalSolution z;
    std::vector<CompressedItem> items;
};

/// Halves every support interval towards the zone's start (jobs released at or
/// before the zone start) or towards its end (the others) and records the
/// innermost subzone holding it. Throws ContractViolation when a job's life
/// lies strictly inside a zone or an interval crosses a deadline.
CompressedSolution compress_to_subzones(const FractionalSolution& y, std::span<const Job> jobs, const GoodIndependentSet& set);

struct AssignmentGraph {
    struct RightVertex {
        Subzone subzone;
        int copy = 1;  ///< 1-based copy index within the subzone
    };
    struct Edge {
        int job = 0;  ///< job id
        int left = 0;
        int right = 0;
        double weight = 0.0;
        Rational length;
        /// Mass of this edge in the fractional matching induced by the solution.
        double fractional = 0.0;
    };

    std::vector<int> left_jobs;  ///< job id per left vertex
    std::vector<RightVertex> right;
    std::vector<Edge> edges;
    /// Weight of the induced fractional matching (equals the solution's energy).
    double fractional_weight = 0.0;
};

/// Per subzone, items sorted by decreasing length (ties by job id) occupy
/// consecutive spans of cumulative mass; an item is joined to every copy whose
/// unit slot (i-1, i] meets its span.
AssignmentGraph build_assignment_graph(const CompressedSolution& z, std::span<const Job> jobs, double alpha);

struct GraphMatching {
    std::vector<int> edge_of_left;  ///< index into AssignmentGraph::edges
    double weight = 0.0;
};

GraphMatching min_weight_saturating_matching(const AssignmentGraph& graph);

struct SubzonePacking {
    Subzone subzone;
    Rational size;            ///< |Z|
    Rational matched_length;  ///< l(Z): sum of matched edge lengths
    double fractional_length = 0.0;  ///< v(Z)
    Rational placed;  ///< length placed in Z and every subzone nested in it
    [[nodiscard]] Rational slack() const { return size - placed; }
};

struct PlacedSchedule {
    Schedule schedule;
    std::vector<SubzonePacking> packing;
};

/// Gives each matched job an interval of a third of its edge length inside
/// its subzone: innermost subzones first, packed from the zone start (earliest
/// deadline first) on the start side and from the zone end (latest release
/// first) on the end side. Throws ContractViolation on a packing failure.
PlacedSchedule matching_to_schedule(const GraphMatching& matching, const AssignmentGraph& graph, const CompressedSolution& z,
                                    std::span<const Job> jobs, const std::string& processor = "p1");

struct RoundingOptions {
    /// Entries of x at or below this are solver noise and are dropped before
    /// each job's mass is scaled to 1.
    double drop_below = 1e-7;
    /// Re-check the relaxation constraints after the first two stages.
    bool check_constraints = true;
    double constraint_tolerance = 1e-6;
};

struct RoundingReport {
    GoodIndependentSet independent_set;
    FractionalSolution x;  ///< input, with each job's mass scaled to exactly 1
    double energy_input = 0.0;  ///< energy of the unscaled input
    FractionalSolution y;
    CompressedSolution z;
    AssignmentGraph graph;
    GraphMatching matching;
    PlacedSchedule placed;

    double energy_x = 0.0;
    double energy_y = 0.0;
    double energy_z = 0.0;
    double matching_weight = 0.0;
    double energy_final = 0.0;

    std::optional<ConstraintReport> constraints_y;
    std::optional<ConstraintReport> constraints_z;

    [[nodiscard]] double ratio() const { return energy_x > 0 ? energy_final / energy_x : 1.0; }
};

/// The full pipeline on a single-processor instance. Throws std::domain_error
/// unless m = 1, and ContractViolation when a job's mass in x is below 1.
RoundingReport round_solution(const FractionalSolution& x, const Instance& instance, const RoundingOptions& options = {});

}  // namespace speedscale
