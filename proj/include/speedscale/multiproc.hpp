#pragma once

#include <map>
#include <string>
#include <vector>

#include "speedscale/instance.hpp"
#include "speedscale/oracle.hpp"
#include "speedscale/rounding.hpp"

namespace speedscale {

/// One independent set per processor and the zones its deadlines cut the time span into.
struct ZonePartition {
    std::vector<GoodIndependentSet> sets;
    /// zones[i]: consecutive zones of processor i, clipped to the instance span.
    std::vector<std::vector<Interval>> zones;
    /// Jobs in no set, by id.
    std::vector<int> residue;
};

/// m earliest-deadline greedy passes, each over the jobs no earlier pass took.
ZonePartition greedy_independent_sets(const Instance& instance);

/// Zone partition for caller-chosen sets (job ids, one list per processor, at
/// most m lists). Throws std::domain_error when a set is not independent, a
/// job appears twice or an id is unknown.
ZonePartition make_zone_partition(const Instance& instance, const std::vector<std::vector<int>>& sets);

struct Window {
    int processor = 0;
    int zone = 0;
    Interval interval;  ///< absolute time
    std::string id;     ///< "p<i>.z<l>", 1-based
};

/// One heterogeneous processor per (processor, zone); job windows are in
/// zone-relative time, clipped to the zone.
struct WindowInstance {
    HeterogeneousInstance instance;
    std::vector<Window> windows;
};

WindowInstance build_heterogeneous_instance(const Instance& instance, const ZonePartition& partition);

enum class WindowStrategy { kLp, kGreedy };

std::string to_string(WindowStrategy strategy);
/// Accepts "lp" and "greedy"; throws std::invalid_argument otherwise.
WindowStrategy parse_window_strategy(const std::string& name);

/// Jobs assigned to one window with their preemptive optimum inside it.
struct WindowPlan {
    int window = 0;
    Instance jobs;  ///< zone-relative single-processor instance
    YdsResult yds;
};

struct WindowAssignment {
    std::map<int, int> window_of_job;
    std::vector<WindowPlan> plans;  ///< windows with at least one job, by window index
    double energy = 0.0;            ///< sum of the per-window preemptive optima
    /// Objective of the fractional assignment for kLp, 0 for kGreedy.
    double fractional_cost = 0.0;
    double congestion = 0.0;
};

/// Assigns every job to one window where it is alive, then solves each window
/// preemptively. kLp: a congestion-capped fractional assignment rounded by a
/// minimum-cost matching over window copies. kGreedy: jobs by deadline, each
/// into the window of least resulting relative load.
WindowAssignment solve_windows(const WindowInstance& windows, WindowStrategy strategy);

/// Gives every job one contiguous interval of its total preemptive duration,
/// in non-decreasing deadline order and no earlier than its release. Throws
/// ContractViolation when an interval would end after the job's deadline.
Schedule edf_reorder(const Instance& window_jobs, const SpeedProfile& profile, const std::string& processor);

struct Repack {
    Schedule schedule;
    /// Common factor applied to all durations; 1 means nothing was shortened.
    double shrink = 1.0;
    std::vector<int> order;  ///< job ids in execution order
};

/// Non-preemptive placement for windows where edf_reorder fails: tries every
/// job order (deadline order only above seven jobs) and keeps the one that
/// needs the mildest uniform shortening of the preemptive durations.
Repack repack_window(const Instance& window_jobs, const SpeedProfile& profile, const std::string& processor);

struct MultiprocResult {
    Schedule schedule;
    double energy = 0.0;
    /// Sum of per-window preemptive optima after assignment.
    double window_energy = 0.0;
    ZonePartition partition;
    WindowInstance windows;
    WindowAssignment assignment;
    int repacked_windows = 0;
    double worst_shrink = 1.0;
};

MultiprocResult schedule_multiproc(const Instance& instance, WindowStrategy strategy = WindowStrategy::kLp);

enum class MoveKind {
    kPaired,       ///< moved next to an overlapping job on its target processor
    kPartner,      ///< squeezed into the shared overlap by a paired job
    kMiddleFifth,  ///< moved into the idle middle fifth of its interval
    kCut,          ///< trimmed to one side of a zone boundary
};

std::string to_string(MoveKind kind);

struct TransformStep {
    int job = 0;
    MoveKind kind = MoveKind::kPaired;
    int partner = 0;  ///< the other job of a pair, 0 otherwise
    Interval before;
    Interval after;
    std::string processor_before;
    std::string processor_after;
    double energy_before = 0.0;
    double energy_after = 0.0;
};

struct TransformResult {
    Schedule schedule;
    std::vector<TransformStep> steps;
};

/// Moves every job of sets[i] onto processor i. A job overlapping some job
/// that stays on processor i by at least 2/5 of the shorter interval shares
/// that overlap with it at a common speed; any other job runs in the middle
/// fifth of its interval. Throws std::domain_error when the schedule is invalid
/// or a set is not independent.
TransformResult transform_assign_to_processors(const Schedule& schedule, const Instance& instance,
                                               const std::vector<std::vector<int>>& sets);

/// Trims every interval on processor i that crosses a deadline of sets[i] to
/// its longer side (the left on ties). Throws std::domain_error when a set job
/// is not on its processor and ContractViolation when an interval crosses two
/// deadlines.
TransformResult cut_at_zone_boundaries(const Schedule& schedule, const Instance& instance, const ZonePartition& partition);

/// (5/2)^(alpha-1) (1 + w_max/w_min)^alpha.
double transform_bound(const Instance& instance);

/// Approximation constant of the multiprocessor algorithm with an exact window
/// solver: 2(1+eps) (5(1+eps))^(alpha-1) B_alpha for equal works, otherwise
/// (5/2)^(alpha-1) B_alpha ((1+eps)(1 + w_max/w_min))^alpha.
double approximation_constant(const Instance& instance, double epsilon);

}  // namespace speedscale
