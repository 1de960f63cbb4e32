#include <doctest.h>

#include <set>

#include "speedscale/errors.hpp"
#include "speedscale/hardness.hpp"
#include "speedscale/instance.hpp"
#include "speedscale/json_io.hpp"

using namespace speedscale;

namespace {

Instance single(Rational r, Rational d, Rational w, double alpha = 2.0) {
    Instance inst;
    inst.alpha = alpha;
    inst.jobs.push_back({1, r, d, w});
    return inst;
}

bool has_kind(const std::vector<Violation>& vs, Violation::Kind kind) {
    for (const auto& v : vs)
        if (v.kind == kind) return true;
    return false;
}

}  // namespace

TEST_SUITE("instances") {

TEST_CASE("rational arithmetic stays exact") {
    const Rational a = Rational::parse("1/3"), b = Rational::parse("1/6");
    CHECK(a + b == Rational::parse("1/2"));
    CHECK((a - b) * 6 == Rational(1));
    CHECK(Rational::parse("4/8") == Rational::parse("1/2"));
    CHECK(Rational::parse("-3/4").str() == "-3/4");
    CHECK(Rational::from_double(0.25) == Rational::parse("1/4"));
    CHECK(Rational::from_double(0.1) == Rational::parse("1/10"));
    CHECK_THROWS(Rational::parse("1/0"));
    CHECK_THROWS(Rational::parse("abc"));
}

TEST_CASE("energy of a single execution") {
    CHECK(energy_of_job(2.0, 1.0, 2.0) == doctest::Approx(4.0));
    CHECK(energy_of_job(1.0, 1.0, 3.0) == doctest::Approx(1.0));
    CHECK(energy_of_job(Rational(3), Rational(2), 2.0) == doctest::Approx(4.5));
}

TEST_CASE("rescaling a constant-speed execution") {
    CHECK(rescale_energy(4.0, 2.0, 1.0, 2.0) == doctest::Approx(8.0));
    CHECK(rescale_energy(5.0, 3.0, 3.0, 2.5) == doctest::Approx(5.0));
    CHECK(rescale_energy(1.0, 1.0, 5.0, 3.0) == doctest::Approx(1.0 / 25));
}

TEST_CASE("schedule energy") {
    Instance two;
    two.jobs = {{1, 0, 1, 1}, {2, 1, 2, 1}};
    Schedule s{{{1, "p1", {0, 1}}, {2, "p1", {1, 2}}}};
    CHECK(energy_of_schedule(s, two) == doctest::Approx(2.0));

    const Instance one = single(0, 2, 4);
    CHECK(energy_of_schedule(Schedule{{{1, "p1", {0, 2}}}}, one) == doctest::Approx(8.0));

    const Instance gap = generate_gap_family(2, 2.0);
    const Rational half = Rational::parse("1/2"), three_halves = Rational::parse("3/2");
    Schedule opt{{{1, "p1", {0, half}}, {3, "p1", {half, three_halves}}, {2, "p1", {three_halves, 2}}}};
    CHECK(energy_of_schedule(opt, gap) == doctest::Approx(8.0));
}

TEST_CASE("schedule validation") {
    const Instance one = single(0, 1, 1);
    CHECK(validate_schedule(Schedule{{{1, "p1", {0, 1}}}}, one).empty());

    Instance two;
    two.jobs = {{1, 0, 2, 1}, {2, 0, 2, 1}};
    CHECK(has_kind(validate_schedule(Schedule{{{1, "p1", {0, 1}}, {2, "p1", {0, 1}}}}, two), Violation::Kind::kOverlap));

    const Instance late = single(2, 3, 1);
    CHECK(has_kind(validate_schedule(Schedule{{{1, "p1", {1, 3}}}}, late), Violation::Kind::kOutsideLife));
    CHECK(has_kind(validate_schedule(Schedule{}, late), Violation::Kind::kMissingJob));
    CHECK(has_kind(validate_schedule(Schedule{{{1, "p7", {2, 3}}}}, late), Violation::Kind::kUnknownProcessor));
    CHECK(has_kind(validate_schedule(Schedule{{{1, "p1", {2, 3}}, {1, "p1", {2, 3}}}}, late), Violation::Kind::kDuplicateJob));
    CHECK_THROWS_AS((void)energy_of_schedule(Schedule{{{1, "p1", {1, 3}}}}, late), ScheduleError);
}

TEST_CASE("touching intervals do not overlap") {
    Instance two;
    two.jobs = {{1, 0, 2, 1}, {2, 0, 2, 1}};
    CHECK(validate_schedule(Schedule{{{1, "p1", {0, 1}}, {2, "p1", {1, 2}}}}, two).empty());
    two.processors = 2;
    CHECK(validate_schedule(Schedule{{{1, "p1", {0, 2}}, {2, "p2", {0, 2}}}}, two).empty());
}

TEST_CASE("instance parsing") {
    const AnyInstance any = parse_instance(R"({"alpha": 2, "processors": 1, "jobs": [{"id": 1, "release": 0, "deadline": 1, "work": 1}]})");
    REQUIRE(std::holds_alternative<Instance>(any));
    CHECK(std::get<Instance>(any).jobs.size() == 1);

    CHECK_THROWS_AS(parse_instance(R"({"alpha": 1, "processors": 1, "jobs": [{"id": 1, "release": 0, "deadline": 1, "work": 1}]})"),
                    ParseError);
    try {
        (void)parse_instance(R"({"alpha": 2, "processors": 1, "jobs": [{"id": 1, "release": 3, "deadline": 2, "work": 1}]})");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.path() == "jobs[0].deadline");
    }
    CHECK_THROWS_AS(parse_instance("{not json"), ParseError);
    CHECK_THROWS_AS(parse_instance(R"({"alpha": 2, "processors": 1, "jobs": [{"id": 1, "release": 0, "deadline": 1, "work": -1}]})"),
                    ParseError);
}

TEST_CASE("fractional times parse exactly") {
    const Instance inst = parse_identical_instance(R"({"alpha": 2.5, "processors": 2, "jobs": [{"id": 4, "release": "1/3", "deadline": 0.75, "work": "5/2"}]})");
    CHECK(inst.jobs[0].release == Rational::parse("1/3"));
    CHECK(inst.jobs[0].deadline == Rational::parse("3/4"));
    CHECK(inst.processors == 2);
}

TEST_CASE("heterogeneous documents from the reduction round-trip") {
    ThreeDMInstance tdm = planted_three_dm(1, 0, 3);
    const ReductionArtifacts art = reduce_three_dm(tdm, 2.0);
    const std::string text = serialize_instance(AnyInstance(art.instance));
    const AnyInstance back = parse_instance(text);
    REQUIRE(std::holds_alternative<HeterogeneousInstance>(back));
    const auto& het = std::get<HeterogeneousInstance>(back);
    CHECK(het.processors.size() == 3);
    CHECK(het.jobs.size() == 5);
    std::set<Rational> works;
    for (const auto& j : het.jobs)
        for (const auto& [p, w] : j.work) works.insert(w);
    CHECK(works == std::set<Rational>{1, 3, 4});
    CHECK(serialize_instance(back) == text);
}

TEST_CASE("gap family") {
    CHECK(generate_gap_family(1, 2.0).jobs.size() == 2);
    const Instance g = generate_gap_family(4, 2.0);
    REQUIRE(g.jobs.size() == 5);
    for (int i = 1; i <= 4; ++i) {
        CHECK(g.jobs[i - 1].release == Rational(i - 1));
        CHECK(g.jobs[i - 1].deadline == Rational(i));
        CHECK(g.jobs[i - 1].work == Rational(1));
    }
    CHECK(g.jobs[4].life() == Interval{0, 4});
    CHECK(g.jobs[4].work == Rational(4));
}

TEST_CASE("random generator") {
    RandomInstanceOptions o;
    o.jobs = 3;
    o.seed = 7;
    CHECK(serialize_instance(AnyInstance(generate_random(o))) == serialize_instance(AnyInstance(generate_random(o))));
    o.seed = 8;
    const Instance other = generate_random(o);
    o.seed = 7;
    CHECK(serialize_instance(AnyInstance(other)) != serialize_instance(AnyInstance(generate_random(o))));

    o.work_min = o.work_max = 1;
    o.jobs = 6;
    for (const auto& j : generate_random(o).jobs) CHECK(j.work == Rational(1));

    o = {};
    o.jobs = 5;
    o.processors = 2;
    o.seed = 1;
    const Instance inst = generate_random(o);
    CHECK(serialize_instance(parse_instance(serialize_instance(AnyInstance(inst)))) == serialize_instance(AnyInstance(inst)));
    for (const auto& j : inst.jobs) {
        CHECK(j.release < j.deadline);
        CHECK(j.release >= Rational(0));
        CHECK(j.deadline <= Rational(o.horizon));
    }
}

TEST_CASE("schedule documents round-trip") {
    Schedule s{{{2, "p2", {Rational::parse("1/3"), 1}}, {1, "p1", {0, 2}}}};
    s.sort();
    const Schedule back = schedule_from_json(schedule_to_json(s, 3.5));
    REQUIRE(back.assignments.size() == 2);
    CHECK(back.assignments[0].job == 1);
    CHECK(back.assignments[1].interval.start == Rational::parse("1/3"));
}

}  // TEST_SUITE
