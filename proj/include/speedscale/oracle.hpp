#pragma once

#include <cstdint>
#include <vector>

#include "speedscale/discretize.hpp"
#include "speedscale/instance.hpp"

namespace speedscale {

struct SpeedSegment {
    Interval interval;
    Rational speed;
};

/// Work of one job processed inside one interval at the profile speed there.
struct WorkPiece {
    int job = 0;
    Interval interval;
    Rational work;
};

/// Piecewise-constant speed over time, with the work of each job spread over it.
struct SpeedProfile {
    std::vector<SpeedSegment> segments;  ///< disjoint, sorted by start
    std::vector<WorkPiece> allocation;   ///< sorted by start
    /// Speed of each extracted critical interval, in extraction order.
    std::vector<Rational> level_speeds;

    [[nodiscard]] double energy(double alpha) const;
    /// 0 outside every segment.
    [[nodiscard]] Rational speed_at(const Rational& t) const;
};

struct YdsResult {
    SpeedProfile profile;
    double energy = 0.0;
};

/// Optimal preemptive single-processor schedule by repeated extraction of the
/// maximum-density interval. Ties go to the earliest start, then the shortest
/// interval. Throws std::domain_error unless m = 1.
YdsResult yds_preemptive(const Instance& instance);

struct BruteForceOptions {
    /// Upper bound on DP transitions (2^n times the number of (job, interval) pairs).
    std::uint64_t cap = 10'000'000;
};

struct BruteForceResult {
    Schedule schedule;
    double energy = 0.0;
    std::uint64_t transitions = 0;
};

/// Minimum-energy non-preemptive schedule among those whose execution
/// intervals start and end on grid points. Each processor is solved by a DP
/// over (scheduled subset, last end point); subsets are then split across
/// processors. Throws SizeLimitError above the cap and InfeasibleError when
/// no grid-aligned schedule exists.
BruteForceResult brute_force_nonpreemptive(const Instance& instance, const LandmarkGrid& grid, const BruteForceOptions& options = {});
BruteForceResult brute_force_nonpreemptive(const HeterogeneousInstance& instance, const LandmarkGrid& grid,
                                           const BruteForceOptions& options = {});

/// sum_{k >= 0} k^(alpha-1) e^(-1) / k!, truncated once the tail bound drops below `tolerance`.
double generalized_bell(double alpha, double tolerance = 1e-12);

}  // namespace speedscale
