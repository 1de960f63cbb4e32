#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "speedscale/discretize.hpp"
#include "speedscale/errors.hpp"
#include "speedscale/hardness.hpp"
#include "speedscale/oracle.hpp"

using namespace speedscale;

namespace {

Instance make(std::vector<Job> jobs, double alpha = 2.0, int m = 1) {
    Instance inst;
    inst.alpha = alpha;
    inst.processors = m;
    inst.jobs = std::move(jobs);
    return inst;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("preemptive optimum on small examples") {
    CHECK(yds_preemptive(make({{1, 0, 2, 4}})).energy == doctest::Approx(8.0));
    const YdsResult two = yds_preemptive(make({{1, 0, 1, 2}, {2, 0, 2, 1}}));
    CHECK(two.energy == doctest::Approx(5.0));
    REQUIRE(two.profile.level_speeds.size() == 2);
    CHECK(two.profile.level_speeds[0] == Rational(2));
    CHECK(two.profile.level_speeds[1] == Rational(1));
    CHECK(yds_preemptive(make({{1, 0, 1, 1}, {2, 0, 2, 1}})).energy == doctest::Approx(2.0));
}

TEST_CASE("preemptive optimum matches the convex reference") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        RandomInstanceOptions o;
        o.jobs = 1 + static_cast<int>(seed % 4);
        o.seed = seed;
        o.alpha = seed % 2 ? 2.0 : 2.5;
        const Instance inst = generate_random(o);
        CAPTURE(seed);
        CHECK(yds_preemptive(inst).energy == doctest::Approx(oracle_support::convex_preemptive_energy(inst)).epsilon(1e-6));
    }
}

TEST_CASE("preemptive profile is consistent") {
    RandomInstanceOptions o;
    o.jobs = 5;
    o.seed = 11;
    const Instance inst = generate_random(o);
    const YdsResult r = yds_preemptive(inst);
    std::map<int, Rational> done;
    for (const auto& p : r.profile.allocation) {
        const Job& j = inst.jobs[inst.index_of(p.job)];
        CHECK(contains(j.life(), p.interval));
        CHECK(p.work == p.interval.length() * r.profile.speed_at(p.interval.midpoint()));
        done[p.job] += p.work;
    }
    for (const auto& j : inst.jobs) CHECK(done[j.id] == j.work);
    for (std::size_t k = 1; k < r.profile.segments.size(); ++k) CHECK(r.profile.segments[k - 1].interval.end <= r.profile.segments[k].interval.start);
    CHECK(r.profile.energy(inst.alpha) == doctest::Approx(r.energy));
    for (std::size_t k = 1; k < r.profile.level_speeds.size(); ++k) CHECK(r.profile.level_speeds[k] <= r.profile.level_speeds[k - 1]);
}

TEST_CASE("preemptive optimum rejects several processors") { CHECK_THROWS_AS(yds_preemptive(make({{1, 0, 1, 1}}, 2.0, 2)), std::domain_error); }

TEST_CASE("brute force on one job uses the whole life interval") {
    const Instance inst = make({{1, 1, 4, 3}});
    for (std::int64_t cells : {1, 3, 5}) {
        const BruteForceResult r = brute_force_nonpreemptive(inst, build_uniform_grid(inst, cells));
        REQUIRE(r.schedule.assignments.size() == 1);
        CHECK(r.schedule.assignments[0].interval == Interval{1, 4});
        CHECK(r.energy == doctest::Approx(3.0));
    }
}

TEST_CASE("brute force on the gap family") {
    const Instance gap = generate_gap_family(2, 2.0);
    // Half-unit cells contain the optimum [0,1/2], [1/2,3/2], [3/2,2].
    CHECK(brute_force_nonpreemptive(gap, build_uniform_grid(gap, 2)).energy == doctest::Approx(8.0));
    CHECK(brute_force_nonpreemptive(gap, build_uniform_grid(gap, 8)).energy == doctest::Approx(8.0));
    const double eps = 0.5;
    const double landmark = brute_force_nonpreemptive(gap, build_grid(gap, eps)).energy;
    CHECK(landmark >= 8.0 - 1e-9);
    CHECK(landmark <= 8.0 * std::pow(1 + eps, gap.alpha - 1) + 1e-9);
}

TEST_CASE("brute force on the reduction with q = 1") {
    const ReductionArtifacts art = reduce_three_dm(planted_three_dm(1, 0, 5), 2.0);
    const BruteForceResult r = brute_force_nonpreemptive(art.instance, build_grid_from_endpoints({Rational(0), Rational(3)}, 3));
    CHECK(r.energy == doctest::Approx(9.0));
    CHECK(validate_schedule(r.schedule, art.instance).empty());
}

TEST_CASE("brute force is a lower bound for grid-aligned schedules and above the preemptive optimum") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        RandomInstanceOptions o;
        o.jobs = 1 + static_cast<int>(seed % 4);
        o.seed = seed;
        const Instance inst = generate_random(o);
        const LandmarkGrid grid = build_uniform_grid(inst, 2);
        BruteForceResult r;
        try {
            r = brute_force_nonpreemptive(inst, grid);
        } catch (const InfeasibleError&) {
            continue;
        }
        CAPTURE(seed);
        CHECK(validate_schedule(r.schedule, inst).empty());
        CHECK(energy_of_schedule(r.schedule, inst) == doctest::Approx(r.energy));
        CHECK(r.energy >= yds_preemptive(inst).energy * (1 - 1e-9));
        // A finer grid that contains the coarse one can only do better.
        CHECK(brute_force_nonpreemptive(inst, build_uniform_grid(inst, 4)).energy <= r.energy + 1e-9);
    }
}

TEST_CASE("brute force spreads jobs over processors") {
    const Instance inst = make({{1, 0, 1, 1}, {2, 0, 1, 1}, {3, 0, 1, 1}}, 2.0, 3);
    const BruteForceResult r = brute_force_nonpreemptive(inst, build_uniform_grid(inst, 1));
    CHECK(r.energy == doctest::Approx(3.0));
    std::set<std::string> used;
    for (const auto& a : r.schedule.assignments) used.insert(a.processor);
    CHECK(used.size() == 3);

    Instance one = inst;
    one.processors = 1;
    CHECK(brute_force_nonpreemptive(one, build_uniform_grid(one, 3)).energy == doctest::Approx(9.0));
}

TEST_CASE("brute force limits") {
    const Instance crowded = make({{1, 0, 1, 1}, {2, 0, 1, 1}});
    CHECK_THROWS_AS(brute_force_nonpreemptive(crowded, build_uniform_grid(crowded, 1)), InfeasibleError);
    const Instance gap = generate_gap_family(8, 2.0);
    BruteForceOptions tiny;
    tiny.cap = 100;
    CHECK_THROWS_AS(brute_force_nonpreemptive(gap, build_uniform_grid(gap, 2), tiny), SizeLimitError);
}

TEST_CASE("generalized Bell numbers") {
    CHECK(generalized_bell(2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(generalized_bell(3.0) == doctest::Approx(2.0).epsilon(1e-12));
    const auto bell = oracle_support::bell_numbers(8);
    for (int k = 1; k < 8; ++k) CHECK(generalized_bell(k + 1.0) == doctest::Approx(bell[k]).epsilon(1e-10));
    for (double tol : {1e-3, 1e-6, 1e-12}) CHECK(std::abs(generalized_bell(2.0, tol) - 1.0) <= tol);
    CHECK(generalized_bell(2.5) > 1.0);
    CHECK(generalized_bell(2.5) < 2.0);
}

}  // TEST_SUITE
