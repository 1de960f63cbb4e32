#include <doctest.h>

#include <set>

#include "speedscale/discretize.hpp"
#include "speedscale/errors.hpp"

using namespace speedscale;

TEST_SUITE("discretize") {

TEST_CASE("landmark counts") {
    CHECK(landmarks_per_gap(2, 1.0) == 7);
    CHECK(landmarks_per_gap(1, 1.0) == 1);
    CHECK(landmarks_per_gap(5, 0.5) == 74);
    CHECK(landmarks_per_gap(3, 0.1) == 98);
    CHECK_THROWS_AS(landmarks_per_gap(3, 0.0), std::domain_error);
}

TEST_CASE("grid over endpoints {0, 1, 2}") {
    Instance inst;
    inst.jobs = {{1, 0, 1, 1}, {2, 1, 2, 1}};
    const LandmarkGrid g = build_grid(inst, 1.0);
    CHECK(g.inserted_per_gap == 7);
    CHECK(g.size() == 17);
    CHECK(g.points.front() == Rational(0));
    CHECK(g.points.back() == Rational(2));
    CHECK(g.points[8] == Rational(1));
    CHECK(g.is_endpoint[0]);
    CHECK(g.is_endpoint[8]);
    CHECK_FALSE(g.is_endpoint[1]);
    CHECK(g.points[1] == Rational::parse("1/8"));
}

TEST_CASE("single job grid") {
    Instance inst;
    inst.jobs = {{1, 0, 1, 1}};
    const LandmarkGrid g = build_grid(inst, 1.0);
    REQUIRE(g.size() == 3);
    CHECK(g.points[1] == Rational::parse("1/2"));
}

TEST_CASE("shared endpoints are not duplicated") {
    Instance inst;
    inst.jobs = {{1, 0, 3, 1}, {2, 0, 3, 2}};
    const LandmarkGrid g = build_uniform_grid(inst, 3);
    CHECK(g.size() == 4);
    CHECK(std::set<Rational>(g.points.begin(), g.points.end()).size() == g.size());
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g.points[k - 1] < g.points[k]);
}

TEST_CASE("unequal gaps get the same number of landmarks") {
    const LandmarkGrid g = build_grid_from_endpoints({Rational(0), Rational(1), Rational(4)}, 2);
    REQUIRE(g.size() == 5);
    CHECK(g.points[1] == Rational::parse("1/2"));
    CHECK(g.points[3] == Rational::parse("5/2"));
    CHECK(g.index_of(Rational(4)) == std::optional<std::size_t>(4));
    CHECK_FALSE(g.index_of(Rational(3)).has_value());
}

TEST_CASE("candidate intervals") {
    const LandmarkGrid g = build_grid_from_endpoints({Rational(0), Rational(1), Rational(2)}, 1);
    CHECK(candidate_intervals(g, Interval{0, 2}) == std::vector<Interval>{{0, 1}, {0, 2}, {1, 2}});
    CHECK(candidate_intervals(g, Interval{0, 1}) == std::vector<Interval>{{0, 1}});
    CHECK(candidate_intervals(g, Job{1, 1, 2, 1}) == std::vector<Interval>{{1, 2}});

    const LandmarkGrid fine = build_grid_from_endpoints({Rational(0), Rational(5)}, 9);
    const std::size_t pts = fine.size();
    CHECK(candidate_intervals(fine, Interval{0, 5}).size() == pts * (pts - 1) / 2);
    const auto range = index_range(fine, Interval{1, 3});
    CHECK_FALSE(index_range(fine, Interval{Rational::parse("1/10"), Rational::parse("2/10")}).has_value());
    REQUIRE(range.has_value());
    CHECK(fine.points[range->first] >= Rational(1));
    CHECK(fine.points[range->second] <= Rational(3));
}

TEST_CASE("grid size limit") {
    Instance inst;
    inst.jobs = {{1, 0, 1, 1}, {2, 1, 2, 1}};
    CHECK_THROWS_AS(build_uniform_grid(inst, 1000, 100), SizeLimitError);
}

}  // TEST_SUITE
