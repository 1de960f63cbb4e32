#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "speedscale/errors.hpp"
#include "speedscale/lp1.hpp"
#include "speedscale/oracle.hpp"
#include "speedscale/rounding.hpp"

using namespace speedscale;

namespace {

std::vector<Job> lives(std::vector<std::pair<int, int>> spans) {
    std::vector<Job> jobs;
    int id = 1;
    for (auto [r, d] : spans) jobs.push_back({id++, r, d, 1});
    return jobs;
}

Rational q(const char* text) { return Rational::parse(text); }

Subzone start_subzone(Interval zone, int depth) { return Subzone{0, zone, ZoneSide::kStart, depth}; }

RoundingReport round_instance(const Instance& inst, double epsilon = 0.5) {
    const Lp1Result lp = solve_lp1(build_lp1(inst, build_grid(inst, epsilon), true));
    return round_solution(lp.solution, inst);
}

}  // namespace

TEST_SUITE("rounding") {

TEST_CASE("earliest-deadline independent set") {
    const auto one = lives({{2, 5}});
    CHECK(good_independent_set(one).jobs == std::vector<int>{1});

    const auto three = lives({{0, 1}, {0, 3}, {2, 3}});
    const GoodIndependentSet s = good_independent_set(three);
    CHECK(s.deadlines == std::vector<Rational>{1, 3});
    CHECK(is_good(s, three));

    const auto nested = lives({{0, 4}, {1, 2}});
    CHECK(good_independent_set(nested).jobs == std::vector<int>{2});
}

TEST_CASE("goodness") {
    const auto jobs = lives({{0, 1}, {9, 10}, {3, 4}});
    CHECK_FALSE(is_good(GoodIndependentSet{{1, 2}, {1, 10}}, jobs));
    CHECK(is_good(GoodIndependentSet{}, std::vector<Job>{}));
    CHECK_THROWS_AS(is_good(GoodIndependentSet{{1, 1}, {1, 1}}, jobs), std::domain_error);

    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        RandomInstanceOptions o;
        o.jobs = 1 + static_cast<int>(seed % 7);
        o.seed = seed;
        o.horizon = 10;
        const Instance inst = generate_random(o);
        CAPTURE(seed);
        CHECK(is_good(good_independent_set(inst.jobs), inst.jobs));
    }
}

TEST_CASE("zones between deadlines") {
    const auto jobs = lives({{0, 1}, {0, 3}, {2, 3}, {1, 6}});
    const GoodIndependentSet s = good_independent_set(jobs);
    const auto zones = zones_of(s, jobs);
    REQUIRE(zones.size() == 3);
    CHECK(zones[0] == Interval{0, 1});
    CHECK(zones[1] == Interval{1, 3});
    CHECK(zones[2] == Interval{3, 6});
}

TEST_CASE("splitting at deadlines") {
    const GoodIndependentSet set{{7}, {1}};
    FractionalSolution x;
    x.alpha = 2.5;
    x.add(1, Interval{0, 3}, 1.0);
    FractionalSolution y = split_at_deadlines(x, set);
    REQUIRE(y.values.size() == 1);
    CHECK(y.values.begin()->first.second == Interval{1, 3});
    CHECK(y.values.begin()->second == doctest::Approx(1.0));
    const Instance inst{2.5, 1, {{1, 0, 3, 2}}};
    CHECK(fractional_energy(y, inst) / fractional_energy(x, inst) == doctest::Approx(std::pow(1.5, 1.5)));

    FractionalSolution untouched;
    untouched.add(1, Interval{2, 3}, 0.5);
    untouched.add(1, Interval{0, 1}, 0.5);
    CHECK(split_at_deadlines(untouched, set).values == untouched.values);

    FractionalSolution tied;
    tied.add(1, Interval{0, 2}, 1.0);
    CHECK(split_at_deadlines(tied, GoodIndependentSet{{7}, {1}}).values.begin()->first.second == Interval{0, 1});

    FractionalSolution crossing_two;
    crossing_two.add(1, Interval{0, 5}, 1.0);
    CHECK_THROWS_AS(split_at_deadlines(crossing_two, GoodIndependentSet{{7, 8}, {1, 3}}), ContractViolation);
}

TEST_CASE("compression toward the zone start") {
    // Zone [0,4] is cut by the deadlines 0 and 4 of the set {1, 2}.
    const std::vector<Job> jobs{{1, -1, 0, 1}, {2, 0, 4, 1}};
    const GoodIndependentSet set{{1, 2}, {0, 4}};
    FractionalSolution y;
    y.add(2, Interval{1, 3}, 1.0);
    const CompressedSolution z = compress_to_subzones(y, jobs, set);
    REQUIRE(z.items.size() == 1);
    CHECK(z.items[0].interval == Interval{q("1/2"), q("3/2")});
    CHECK(z.items[0].subzone.side == ZoneSide::kStart);
    CHECK(z.items[0].subzone.depth == 1);
    CHECK(z.items[0].subzone.interval() == Interval{0, 2});
}

TEST_CASE("compression toward the zone end") {
    const std::vector<Job> jobs{{1, -1, 0, 1}, {2, 1, 4, 1}};
    const GoodIndependentSet set{{1, 2}, {0, 4}};
    FractionalSolution y;
    y.add(2, Interval{1, 3}, 1.0);
    const CompressedSolution z = compress_to_subzones(y, jobs, set);
    REQUIRE(z.items.size() == 1);
    CHECK(z.items[0].interval == Interval{q("5/2"), q("7/2")});
    CHECK(z.items[0].subzone.side == ZoneSide::kEnd);
    CHECK(z.items[0].subzone.interval() == Interval{2, 4});
}

TEST_CASE("compressed intervals land in the innermost subzone") {
    const std::vector<Job> jobs{{1, -1, 0, 1}, {2, 0, 4, 1}};
    const GoodIndependentSet set{{1, 2}, {0, 4}};
    // e in (gap/2^k, gap/2^(k-1)] puts [0, e/2] at depth k.
    const std::vector<std::pair<Rational, int>> cases{{4, 1}, {q("5/2"), 1}, {2, 2}, {q("3/2"), 2}, {1, 3}, {q("1/3"), 4}};
    for (const auto& [e, depth] : cases) {
        FractionalSolution y;
        y.add(2, Interval{0, e}, 1.0);
        const CompressedSolution z = compress_to_subzones(y, jobs, set);
        CAPTURE(e);
        CHECK(z.items[0].subzone.depth == depth);
        CHECK(contains(z.items[0].subzone.interval(), z.items[0].interval));
    }
}

TEST_CASE("assignment graph on the worked example") {
    const std::vector<Job> jobs{{1, 0, 8, 1}, {2, 0, 8, 1}};
    const Interval zone{0, 8};
    CompressedSolution z;
    z.items.push_back({1, Interval{0, q("3/5")}, 0.5, start_subzone(zone, 1)});
    z.items.push_back({2, Interval{0, q("2/5")}, 0.8, start_subzone(zone, 1)});
    const AssignmentGraph g = build_assignment_graph(z, jobs, 2.0);
    REQUIRE(g.right.size() == 2);
    REQUIRE(g.edges.size() == 3);
    CHECK(g.edges[0].job == 1);
    CHECK(g.edges[0].right == 0);
    CHECK(g.edges[1].job == 2);
    CHECK(g.edges[1].right == 0);
    CHECK(g.edges[2].job == 2);
    CHECK(g.edges[2].right == 1);
    CHECK(g.edges[1].weight == g.edges[2].weight);
    CHECK(g.edges[1].length == g.edges[2].length);
    CHECK(g.edges[1].fractional == doctest::Approx(0.5));
    CHECK(g.edges[2].fractional == doctest::Approx(0.3));

    const double wa = energy_of_job(1.0, 0.6, 2.0), wb = energy_of_job(1.0, 0.4, 2.0);
    CHECK(g.fractional_weight == doctest::Approx(0.5 * wa + 0.8 * wb));
    const GraphMatching m = min_weight_saturating_matching(g);
    CHECK(m.weight == doctest::Approx(wa + wb));
}

TEST_CASE("assignment graph with a single item") {
    const std::vector<Job> jobs{{1, 0, 8, 2}};
    CompressedSolution z;
    z.items.push_back({1, Interval{0, 2}, 1.0, start_subzone(Interval{0, 8}, 2)});
    const AssignmentGraph g = build_assignment_graph(z, jobs, 2.0);
    CHECK(g.right.size() == 1);
    REQUIRE(g.edges.size() == 1);
    const GraphMatching m = min_weight_saturating_matching(g);
    CHECK(m.weight == doctest::Approx(g.edges[0].weight));
    CHECK(m.edge_of_left == std::vector<int>{0});
}

TEST_CASE("placement uses a third of the edge length from the zone start") {
    const Instance inst{2.0, 1, {{1, 0, 4, 1}}};
    const RoundingReport r = round_instance(inst);
    REQUIRE(r.placed.schedule.assignments.size() == 1);
    // LP puts the job on [0,4]; compression gives [0,2]; a third of it is placed.
    CHECK(r.placed.schedule.assignments[0].interval == Interval{0, q("2/3")});
    CHECK(r.ratio() == doctest::Approx(6.0));
    CHECK(r.ratio() <= 12.0);
}

TEST_CASE("single jobs give the compress-and-place factor for every alpha") {
    for (double alpha : {1.5, 2.0, 3.0}) {
        const Instance inst{alpha, 1, {{1, 1, 3, 2}}};
        const RoundingReport r = round_instance(inst);
        CHECK(r.ratio() == doctest::Approx(std::pow(6.0, alpha - 1)));
        CHECK(r.ratio() <= std::pow(12.0, alpha - 1));
    }
}

TEST_CASE("pipeline on random instances") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        RandomInstanceOptions o;
        o.jobs = 4;
        o.seed = seed;
        const Instance inst = generate_random(o);
        const LandmarkGrid grid = build_grid(inst, 0.5);
        const Lp1Result lp = solve_lp1(build_lp1(inst, grid, true));
        const RoundingReport r = round_solution(lp.solution, inst);
        const double a = inst.alpha;
        CAPTURE(seed);
        CHECK(validate_schedule(r.placed.schedule, inst).empty());
        CHECK(energy_of_schedule(r.placed.schedule, inst) == doctest::Approx(r.energy_final));
        CHECK(r.energy_final <= std::pow(12.0, a - 1) * lp.value * (1 + 1e-9));
        CHECK(r.energy_y <= std::pow(2.0, a - 1) * r.energy_x * (1 + 1e-9));
        CHECK(r.energy_z == doctest::Approx(std::pow(2.0, a - 1) * r.energy_y));
        CHECK(r.matching_weight <= r.energy_z * (1 + 1e-9));
        CHECK(r.energy_final == doctest::Approx(std::pow(3.0, a - 1) * r.matching_weight));
        CHECK(r.energy_final >= yds_preemptive(inst).energy * (1 - 1e-9));
        // The grid optimum is within (1+eps)^(alpha-1) of the true optimum.
        CHECK(r.energy_final >= brute_force_nonpreemptive(inst, grid).energy / std::pow(1.5, a - 1) * (1 - 1e-9));
        REQUIRE(r.constraints_y.has_value());
        CHECK(r.constraints_y->ok(1e-6, true));
        REQUIRE(r.constraints_z.has_value());
        CHECK(r.constraints_z->ok(1e-6, true));
    }
}

TEST_CASE("subzone packing stays within each subzone") {
    for (std::uint64_t seed = 30; seed <= 40; ++seed) {
        RandomInstanceOptions o;
        o.jobs = 5;
        o.seed = seed;
        o.alpha = 3.0;
        const Instance inst = generate_random(o);
        const RoundingReport r = round_instance(inst);
        CAPTURE(seed);
        for (const auto& p : r.placed.packing) {
            CHECK(p.slack() >= Rational(0));
            CHECK(p.matched_length.to_double() <= p.size.to_double() + p.fractional_length + 1e-9);
        }
        for (const auto& a : r.placed.schedule.assignments) {
            const auto it = std::find_if(r.matching.edge_of_left.begin(), r.matching.edge_of_left.end(),
                                         [&](int e) { return r.graph.edges[e].job == a.job; });
            REQUIRE(it != r.matching.edge_of_left.end());
            CHECK(a.interval.length() * 3 == r.graph.edges[*it].length);
        }
    }
}

TEST_CASE("inputs the pipeline refuses") {
    const Instance two{2.0, 2, {{1, 0, 1, 1}}};
    FractionalSolution x;
    x.add(1, Interval{0, 1}, 1.0);
    CHECK_THROWS_AS(round_solution(x, two), std::domain_error);
    const Instance one{2.0, 1, {{1, 0, 1, 1}}};
    FractionalSolution light;
    light.add(1, Interval{0, 1}, 0.5);
    CHECK_THROWS_AS(round_solution(light, one), ContractViolation);
}

}  // TEST_SUITE
