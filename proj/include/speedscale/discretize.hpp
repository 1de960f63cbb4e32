#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "speedscale/instance.hpp"

namespace speedscale {

/// Sorted distinct time points on which landmark-aligned schedules start and end.
struct LandmarkGrid {
    std::vector<Rational> points;
    /// is_endpoint[i] is true when points[i] is a release date or deadline.
    std::vector<bool> is_endpoint;
    /// Accuracy parameter the grid was built for; 0 for grids built by point count.
    double epsilon = 0.0;
    /// Points inserted strictly inside every nonzero gap between consecutive endpoints.
    std::int64_t inserted_per_gap = 0;

    [[nodiscard]] std::size_t size() const { return points.size(); }
    [[nodiscard]] std::optional<std::size_t> index_of(const Rational& t) const;
};

/// Number of landmarks inserted per gap for n jobs: ceil(n^2 (1 + 1/epsilon)) - 1.
std::int64_t landmarks_per_gap(std::size_t jobs, double epsilon);

/// Endpoint grid refined with landmarks_per_gap(n, epsilon) equally spaced points per gap.
/// Throws SizeLimitError when the grid would exceed max_points.
LandmarkGrid build_grid(const Instance& instance, double epsilon, std::size_t max_points = 200000);

/// Endpoint grid with each gap cut into `cells_per_gap` equal cells.
LandmarkGrid build_uniform_grid(const Instance& instance, std::int64_t cells_per_gap, std::size_t max_points = 200000);

/// Grid from an explicit endpoint set (deduplicated), refined as in build_uniform_grid.
LandmarkGrid build_grid_from_endpoints(std::vector<Rational> endpoints, std::int64_t cells_per_gap, std::size_t max_points = 200000);

/// All [a, b] with a < b grid points and [a, b] inside `life`, ordered by start then end.
std::vector<Interval> candidate_intervals(const LandmarkGrid& grid, const Interval& life);
std::vector<Interval> candidate_intervals(const LandmarkGrid& grid, const Job& job);

/// Grid index range [first, last] of the points inside `life`; nullopt when fewer than two.
std::optional<std::pair<std::size_t, std::size_t>> index_range(const LandmarkGrid& grid, const Interval& life);

}  // namespace speedscale
