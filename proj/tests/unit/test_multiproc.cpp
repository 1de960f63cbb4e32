#include <doctest.h>

#include <cmath>
#include <set>

#include "speedscale/errors.hpp"
#include "speedscale/multiproc.hpp"

using namespace speedscale;

namespace {

Instance make(std::vector<Job> jobs, int m, double alpha = 2.0) {
    Instance inst;
    inst.alpha = alpha;
    inst.processors = m;
    inst.jobs = std::move(jobs);
    return inst;
}

Rational q(const char* text) { return Rational::parse(text); }

double energy_ratio(const TransformStep& s) { return s.energy_after / s.energy_before; }

}  // namespace

TEST_SUITE("multiproc") {

TEST_CASE("greedy sets") {
    RandomInstanceOptions o;
    o.jobs = 6;
    o.seed = 3;
    const Instance one = generate_random(o);
    const ZonePartition p1 = greedy_independent_sets(one);
    REQUIRE(p1.sets.size() == 1);
    CHECK(p1.sets[0].jobs == good_independent_set(one.jobs).jobs);

    const ZonePartition disjoint = greedy_independent_sets(make({{1, 0, 1, 1}, {2, 1, 2, 1}, {3, 2, 3, 1}}, 3));
    CHECK(disjoint.sets[0].jobs == std::vector<int>{1, 2, 3});
    CHECK(disjoint.sets[1].jobs.empty());
    CHECK(disjoint.residue.empty());

    const ZonePartition same = greedy_independent_sets(make({{1, 0, 2, 1}, {2, 0, 2, 1}, {3, 0, 2, 1}}, 2));
    CHECK(same.sets[0].jobs == std::vector<int>{1});
    CHECK(same.sets[1].jobs == std::vector<int>{2});
    CHECK(same.residue == std::vector<int>{3});
}

TEST_CASE("chosen sets must be independent and disjoint") {
    const Instance inst = make({{1, 0, 2, 1}, {2, 1, 3, 1}, {3, 2, 4, 1}}, 2);
    CHECK_THROWS_AS(make_zone_partition(inst, {{1, 2}}), std::domain_error);
    CHECK_THROWS_AS(make_zone_partition(inst, {{1}, {1}}), std::domain_error);
    CHECK_THROWS_AS(make_zone_partition(inst, {{1}, {2}, {3}}), std::domain_error);
    const ZonePartition p = make_zone_partition(inst, {{3, 1}});
    CHECK(p.sets[0].jobs == std::vector<int>{1, 3});
    CHECK(p.sets.size() == 2);
    CHECK(p.residue == std::vector<int>{2});
}

TEST_CASE("windows clip lives to zones") {
    const Instance inst = make({{1, 0, 2, 1}, {2, 0, 5, 3}}, 1);
    const ZonePartition p = greedy_independent_sets(inst);
    REQUIRE(p.zones[0].size() == 2);
    const WindowInstance w = build_heterogeneous_instance(inst, p);
    REQUIRE(w.windows.size() == 2);
    CHECK(w.windows[1].id == "p1.z2");
    CHECK(w.windows[1].interval == Interval{2, 5});
    const HeterogeneousJob& j2 = w.instance.jobs[w.instance.index_of(2)];
    CHECK(j2.life_on("p1.z1") == Interval{0, 2});
    CHECK(j2.life_on("p1.z2") == Interval{0, 3});
    CHECK(w.instance.jobs[w.instance.index_of(1)].work.count("p1.z2") == 0);
}

TEST_CASE("window assignment by both strategies") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RandomInstanceOptions o;
        o.jobs = 7;
        o.processors = 2 + static_cast<int>(seed % 2);
        o.seed = seed;
        const Instance inst = generate_random(o);
        const WindowInstance w = build_heterogeneous_instance(inst, greedy_independent_sets(inst));
        for (auto strategy : {WindowStrategy::kLp, WindowStrategy::kGreedy}) {
            const WindowAssignment a = solve_windows(w, strategy);
            CAPTURE(seed);
            CHECK(a.window_of_job.size() == inst.jobs.size());
            double total = 0.0;
            for (const auto& plan : a.plans) {
                total += plan.yds.energy;
                for (const auto& j : plan.jobs.jobs) {
                    CHECK(a.window_of_job.at(j.id) == plan.window);
                    CHECK(j.work == inst.jobs[inst.index_of(j.id)].work);
                    CHECK(interiors_intersect(w.windows[plan.window].interval, inst.jobs[inst.index_of(j.id)].life()));
                }
            }
            CHECK(a.energy == doctest::Approx(total));
            if (strategy == WindowStrategy::kLp) CHECK(a.congestion > 0.0);
        }
    }
}

TEST_CASE("strategy names") {
    CHECK(parse_window_strategy("lp") == WindowStrategy::kLp);
    CHECK(to_string(parse_window_strategy("greedy")) == "greedy");
    CHECK_THROWS_AS(parse_window_strategy("fast"), std::invalid_argument);
}

TEST_CASE("deadline-ordered reordering") {
    const Instance w = make({{1, 0, 1, 1}, {2, 0, 2, 1}}, 1);
    const Schedule s = edf_reorder(w, yds_preemptive(w).profile, "p1");
    REQUIRE(s.assignments.size() == 2);
    CHECK(s.assignments[0].interval == Interval{0, 1});
    CHECK(s.assignments[1].interval == Interval{1, 2});
    CHECK(s.assignments[1].processor == "p1");

    // Deadline order puts job 2 on [1,2] and pushes job 1 past 3.
    const Instance bad = make({{1, 0, 3, 2}, {2, 1, 2, 1}}, 1);
    const YdsResult y = yds_preemptive(bad);
    CHECK_THROWS_AS(edf_reorder(bad, y.profile, "p1"), ContractViolation);
    const Repack r = repack_window(bad, y.profile, "p1");
    CHECK(r.order.size() == 2);
    CHECK(r.shrink == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
    CHECK(r.shrink <= 2.0 / 3.0);
    CHECK(validate_schedule(r.schedule, bad).empty());
}

TEST_CASE("full multiprocessor schedules") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RandomInstanceOptions o;
        o.jobs = 6;
        o.processors = 2 + static_cast<int>(seed % 2);
        o.seed = 100 + seed;
        o.alpha = seed % 3 ? 2.0 : 3.0;
        const Instance inst = generate_random(o);
        Instance single = inst;
        single.processors = 1;
        const double pooled = yds_preemptive(single).energy / std::pow(inst.processors, inst.alpha - 1);
        for (auto strategy : {WindowStrategy::kLp, WindowStrategy::kGreedy}) {
            const MultiprocResult r = schedule_multiproc(inst, strategy);
            CAPTURE(seed);
            CHECK(validate_schedule(r.schedule, inst).empty());
            CHECK(r.schedule.assignments.size() == inst.jobs.size());
            CHECK(r.energy >= pooled * (1 - 1e-9));
            if (r.repacked_windows == 0) CHECK(r.energy == doctest::Approx(r.window_energy));
        }
    }
}

TEST_CASE("moving a job into the middle fifth") {
    const Instance inst = make({{1, 0, 5, 1}}, 2);
    const Schedule s{{{1, "p2", Interval{0, 5}}}};
    const TransformResult t = transform_assign_to_processors(s, inst, {{1}});
    REQUIRE(t.steps.size() == 1);
    CHECK(t.steps[0].kind == MoveKind::kMiddleFifth);
    CHECK(t.steps[0].after == Interval{2, 3});
    CHECK(t.schedule.assignments[0].processor == "p1");
    CHECK(energy_ratio(t.steps[0]) == doctest::Approx(5.0));
}

TEST_CASE("pairing with an overlapping job splits the overlap by work") {
    const Instance inst = make({{1, 0, 5, 1}, {2, 0, 5, 1}}, 2, 3.0);
    const Schedule s{{{1, "p2", Interval{0, 5}}, {2, "p1", Interval{0, 5}}}};
    const TransformResult t = transform_assign_to_processors(s, inst, {{1}});
    REQUIRE(t.steps.size() == 2);
    for (const auto& step : t.steps) CHECK(energy_ratio(step) == doctest::Approx(4.0));
    CHECK(t.schedule.find(1)->interval == Interval{0, q("5/2")});
    CHECK(t.schedule.find(2)->interval == Interval{q("5/2"), 5});

    const Instance uneven = make({{1, 0, 5, 1}, {2, 0, 5, 4}}, 2);
    const TransformResult u = transform_assign_to_processors(s, uneven, {{1}});
    CHECK(u.schedule.find(1)->interval == Interval{0, 1});
    CHECK(u.schedule.find(2)->interval == Interval{1, 5});
}

TEST_CASE("cutting at zone boundaries") {
    const Instance inst = make({{1, 0, 2, 1}, {2, 1, 4, 1}}, 1);
    const ZonePartition p = make_zone_partition(inst, {{1}});
    const Schedule s{{{1, "p1", Interval{0, 1}}, {2, "p1", Interval{1, 4}}}};
    const TransformResult t = cut_at_zone_boundaries(s, inst, p);
    REQUIRE(t.steps.size() == 1);
    CHECK(t.steps[0].after == Interval{2, 4});
    CHECK(energy_ratio(t.steps[0]) == doctest::Approx(1.5));

    const Schedule elsewhere{{{1, "p2", Interval{0, 1}}, {2, "p1", Interval{1, 4}}}};
    CHECK_THROWS_AS(cut_at_zone_boundaries(elsewhere, inst, p), std::domain_error);

    const Instance three = make({{1, 0, 1, 1}, {2, 2, 3, 1}, {3, 0, 4, 1}}, 2);
    const ZonePartition both = make_zone_partition(three, {{1, 2}});
    const Schedule across{{{1, "p1", Interval{0, q("1/2")}}, {2, "p1", Interval{q("7/2"), 4}}, {3, "p1", Interval{q("1/2"), q("7/2")}}}};
    CHECK_THROWS_AS(cut_at_zone_boundaries(across, three, both), ContractViolation);
}

TEST_CASE("transformed schedules stay within the transform bound") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        RandomInstanceOptions o;
        o.jobs = 4;
        o.processors = 2;
        o.seed = 300 + seed;
        const Instance inst = generate_random(o);
        const BruteForceResult opt = brute_force_nonpreemptive(inst, build_grid(inst, 1.0));
        const ZonePartition p = greedy_independent_sets(inst);
        std::vector<std::vector<int>> sets;
        for (const auto& s : p.sets) sets.push_back(s.jobs);
        const TransformResult moved = transform_assign_to_processors(opt.schedule, inst, sets);
        const TransformResult cut = cut_at_zone_boundaries(moved.schedule, inst, p);
        CAPTURE(seed);
        CHECK(validate_schedule(cut.schedule, inst).empty());
        CHECK(energy_of_schedule(cut.schedule, inst) <= transform_bound(inst) * opt.energy * (1 + 1e-9));
        for (const auto& step : cut.steps) CHECK(step.energy_after <= 2.0 * step.energy_before * (1 + 1e-12));
        ++checked;
    }
    CHECK(checked == 30);
}

TEST_CASE("approximation constants") {
    const Instance equal = make({{1, 0, 1, 2}, {2, 0, 3, 2}}, 2);
    CHECK(approximation_constant(equal, 0.0) == doctest::Approx(10.0));
    CHECK(approximation_constant(equal, 0.5) == doctest::Approx(2 * 1.5 * 7.5));
    const Instance mixed = make({{1, 0, 1, 1}, {2, 0, 3, 3}}, 2);
    CHECK(transform_bound(mixed) == doctest::Approx(2.5 * 16));
    CHECK(approximation_constant(mixed, 0.0) == doctest::Approx(2.5 * 16));
}

}  // TEST_SUITE
