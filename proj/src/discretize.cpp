#include "speedscale/discretize.hpp"

#include <algorithm>
#include <cmath>

#include "speedscale/errors.hpp"

namespace speedscale {

std::optional<std::size_t> LandmarkGrid::index_of(const Rational& t) const {
    auto it = std::lower_bound(points.begin(), points.end(), t);
    if (it == points.end() || *it != t) return std::nullopt;
    return static_cast<std::size_t>(it - points.begin());
}

std::int64_t landmarks_per_gap(std::size_t jobs, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::domain_error("epsilon must be positive");
    const double n = static_cast<double>(jobs);
    const double raw = n * n * (1.0 + 1.0 / epsilon);
    // Absorb representation error so that e.g. epsilon = 0.1 gives exactly 11 n^2.
    const double rounded = std::ceil(raw * (1.0 - 1e-12));
    if (rounded > 1e12) throw SizeLimitError("landmark count per gap is too large");
    return std::max<std::int64_t>(0, static_cast<std::int64_t>(rounded) - 1);
}

LandmarkGrid build_grid_from_endpoints(std::vector<Rational> endpoints, std::int64_t cells_per_gap, std::size_t max_points) {
    if (cells_per_gap < 1) throw std::domain_error("cells per gap must be >= 1");
    std::sort(endpoints.begin(), endpoints.end());
    endpoints.erase(std::unique(endpoints.begin(), endpoints.end()), endpoints.end());
    LandmarkGrid grid;
    grid.inserted_per_gap = cells_per_gap - 1;
    if (endpoints.empty()) return grid;
    const auto gaps = static_cast<double>(endpoints.size() - 1);
    if (gaps * static_cast<double>(cells_per_gap) + 1.0 > static_cast<double>(max_points))
        throw SizeLimitError("landmark grid would have more than " + std::to_string(max_points) + " points");
    grid.points.reserve(static_cast<std::size_t>(gaps * static_cast<double>(cells_per_gap)) + 1);
    for (std::size_t i = 0; i + 1 < endpoints.size(); ++i) {
        grid.points.push_back(endpoints[i]);
        grid.is_endpoint.push_back(true);
        const Rational step = (endpoints[i + 1] - endpoints[i]) / Rational(cells_per_gap);
        for (std::int64_t k = 1; k < cells_per_gap; ++k) {
            grid.points.push_back(endpoints[i] + step * Rational(k));
            grid.is_endpoint.push_back(false);
        }
    }
    grid.points.push_back(endpoints.back());
    grid.is_endpoint.push_back(true);
    return grid;
}

namespace {

std::vector<Rational> endpoints_of(const Instance& instance) {
    std::vector<Rational> e;
    for (const auto& j : instance.jobs) {
        e.push_back(j.release);
        e.push_back(j.deadline);
    }
    return e;
}

}  // namespace

LandmarkGrid build_grid(const Instance& instance, double epsilon, std::size_t max_points) {
    const std::int64_t inserted = landmarks_per_gap(instance.jobs.size(), epsilon);
    LandmarkGrid grid = build_grid_from_endpoints(endpoints_of(instance), inserted + 1, max_points);
    grid.epsilon = epsilon;
    return grid;
}

LandmarkGrid build_uniform_grid(const Instance& instance, std::int64_t cells_per_gap, std::size_t max_points) {
    return build_grid_from_endpoints(endpoints_of(instance), cells_per_gap, max_points);
}

std::optional<std::pair<std::size_t, std::size_t>> index_range(const LandmarkGrid& grid, const Interval& life) {
    const auto lo = static_cast<std::size_t>(std::lower_bound(grid.points.begin(), grid.points.end(), life.start) - grid.points.begin());
    const auto hi_it = std::upper_bound(grid.points.begin(), grid.points.end(), life.end);
    if (hi_it == grid.points.begin()) return std::nullopt;
    const auto hi = static_cast<std::size_t>(hi_it - grid.points.begin()) - 1;
    if (lo >= grid.points.size() || hi <= lo) return std::nullopt;
    return std::make_pair(lo, hi);
}

std::vector<Interval> candidate_intervals(const LandmarkGrid& grid, const Interval& life) {
    std::vector<Interval> out;
    const auto range = index_range(grid, life);
    if (!range) return out;
    const auto [lo, hi] = *range;
    for (std::size_t a = lo; a < hi; ++a)
        for (std::size_t b = a + 1; b <= hi; ++b) out.push_back({grid.points[a], grid.points[b]});
    return out;
}

std::vector<Interval> candidate_intervals(const LandmarkGrid& grid, const Job& job) { return candidate_intervals(grid, job.life()); }

}  // namespace speedscale
