#include <doctest.h>

#include <cmath>
#include <limits>

#include "speedscale/errors.hpp"
#include "speedscale/hardness.hpp"

using namespace speedscale;

namespace {

/// Machine of every job when the triples in `matching` host their elements and
/// dummy jobs fill the remaining machines one each.
std::vector<std::string> intended_assignment(const ReductionArtifacts& art, const std::vector<int>& matching) {
    std::vector<std::string> where(art.instance.jobs.size());
    std::vector<std::string> free;
    for (const auto& p : art.instance.processors) free.push_back(p.id);
    for (int t : matching) {
        for (int e : art.source.triples[t]) where[art.element_job[e] - 1] = art.triple_machine[t];
        std::erase(free, art.triple_machine[t]);
    }
    for (std::size_t k = 0; k < art.dummy_jobs.size(); ++k) where[art.dummy_jobs[k] - 1] = free.at(k);
    return where;
}

}  // namespace

TEST_SUITE("hardness") {

TEST_CASE("reduction sizes and works") {
    const ThreeDMInstance tdm = planted_three_dm(1, 0, 1);
    const ReductionArtifacts art = reduce_three_dm(tdm, 2.0);
    CHECK(art.instance.processors.size() == 3);
    CHECK(art.instance.jobs.size() == 5);
    CHECK(art.triple_machine == std::vector<std::string>{"t1"});
    CHECK(art.dummy_machines == std::vector<std::string>{"d1", "d2"});
    CHECK(art.dummy_jobs == std::vector<int>{4, 5});
    for (int e = 0; e < 3; ++e) {
        const auto& job = art.instance.jobs[art.instance.index_of(art.element_job[e])];
        CHECK(job.work.at("t1") == Rational(1));
        CHECK(job.work.at("d1") == Rational(4));
        CHECK(job.life == Interval{0, 3});
    }
    CHECK(art.instance.jobs[art.instance.index_of(5)].work.at("t1") == Rational(3));
    CHECK(art.element_of(4) == -1);
    CHECK(art.triple_of("d2") == -1);

    const ReductionArtifacts two = reduce_three_dm(planted_three_dm(2, 3, 7), 2.0);
    CHECK(two.instance.processors.size() == 6);
    CHECK(two.instance.jobs.size() == 10);
}

TEST_CASE("a perfect matching gives energy 9q") {
    for (int q : {1, 2, 3}) {
        const ThreeDMInstance tdm = planted_three_dm(q, 2, 11);
        const ReductionArtifacts art = reduce_three_dm(tdm, 2.0);
        std::vector<int> planted;
        for (std::size_t t = 0; t < tdm.triples.size() && static_cast<int>(planted.size()) < q; ++t) {
            bool clash = false;
            for (int u : planted)
                for (int e : tdm.triples[t])
                    for (int f : tdm.triples[u]) clash = clash || e == f;
            if (!clash) planted.push_back(static_cast<int>(t));
        }
        if (static_cast<int>(planted.size()) < q) continue;
        const Schedule s = balanced_schedule(art, intended_assignment(art, planted));
        CAPTURE(q);
        CHECK(validate_schedule(s, art.instance).empty());
        CHECK(energy_of_schedule(s, art.instance) == doctest::Approx(9.0 * q));
        CHECK(extract_matching(s, art).size() == static_cast<std::size_t>(q));
    }
}

TEST_CASE("repair swaps element jobs onto their triple machines") {
    const ReductionArtifacts art = reduce_three_dm(planted_three_dm(1, 0, 1), 2.0);
    // Element job 1 sits on d1 and a dummy job on t1.
    const std::vector<std::string> where{"d1", "t1", "t1", "t1", "d2"};
    const Schedule s = balanced_schedule(art, where);
    const RepairResult r = repair_schedule(s, art);
    REQUIRE(r.steps.size() == 1);
    CHECK(r.steps[0].job == 1);
    CHECK(r.steps[0].from == "d1");
    CHECK(r.steps[0].to == "t1");
    CHECK(r.steps[0].swapped_with == 4);
    CHECK(r.steps[0].load_energy_after < r.steps[0].load_energy_before);
    CHECK(r.machine_of_job == std::vector<std::string>{"t1", "t1", "t1", "d1", "d2"});
    CHECK(energy_of_schedule(r.schedule, art.instance) == doctest::Approx(9.0));
    CHECK(extract_matching(s, art) == std::vector<int>{0});

    const Schedule good = balanced_schedule(art, {"t1", "t1", "t1", "d1", "d2"});
    CHECK(repair_schedule(good, art).steps.empty());

    Schedule broken = good;
    broken.assignments.pop_back();
    CHECK_THROWS_AS(repair_schedule(broken, art), std::domain_error);
}

TEST_CASE("gap constant") {
    CHECK(gap_beta(2.0) == doctest::Approx(2.0));
    CHECK(gap_beta(3.0) == doctest::Approx(2.0 / 3.0));
    CHECK(gap_beta(1.0 + 1e-4) > 1e3);
    CHECK(gap_beta(1.0 + 1e-4) > gap_beta(1.0 + 1e-2));
    CHECK_THROWS_AS(gap_beta(1.0), std::domain_error);
}

TEST_CASE("gap inequality over every assignment with q = 1") {
    const ReductionArtifacts art = reduce_three_dm(planted_three_dm(1, 0, 1), 2.0);
    const std::vector<std::string> machines{"t1", "d1", "d2"};
    int count = 0;
    for (int code = 0; code < 243; ++code) {
        std::vector<std::string> where;
        for (int k = 0, c = code; k < 5; ++k, c /= 3) where.push_back(machines[c % 3]);
        const Schedule s = balanced_schedule(art, where);
        const GapReport g = verify_gap_inequality(art, s, 1, 9.0);
        CAPTURE(code);
        CHECK(g.ok());
        CHECK(g.energy >= 9.0 - 1e-9);
        ++count;
    }
    CHECK(count == 243);
}

TEST_CASE("gap inequality fails against a wrong optimum") {
    const ReductionArtifacts art = reduce_three_dm(planted_three_dm(1, 0, 1), 2.0);
    const Schedule s = balanced_schedule(art, {"d1", "d1", "d2", "t1", "t1"});
    const GapReport honest = verify_gap_inequality(art, s, 1, 9.0);
    CHECK(honest.ok());
    CHECK(honest.matching_size == 1);
    const GapReport inflated = verify_gap_inequality(art, s, 1, 100.0);
    CHECK_FALSE(inflated.opt_bound_holds);
    const GapReport wrong_source = verify_gap_inequality(art, balanced_schedule(art, {"t1", "t1", "t1", "d1", "d2"}), 3, 9.0);
    CHECK_FALSE(wrong_source.gap_holds);
}

TEST_CASE("three-dimensional matching input") {
    const ThreeDMInstance tdm = parse_three_dm(R"({"q": 2, "triples": [["x","u","p"],["y","v","r"],["x","v","r"]]})");
    CHECK(tdm.q == 2);
    CHECK(tdm.labels == std::vector<std::string>{"x", "y", "u", "v", "p", "r"});
    CHECK(tdm.triples[2] == std::array<int, 3>{0, 3, 5});
    CHECK(max_three_dm(tdm) == 2);
    CHECK(parse_three_dm(three_dm_to_json(tdm).dump()).triples == tdm.triples);

    CHECK_THROWS_AS(parse_three_dm(R"({"q": 2, "triples": [["x","u","p"]]})"), ParseError);
    CHECK_THROWS_AS(parse_three_dm(R"({"q": 1, "triples": [["x","u"]]})"), ParseError);
    CHECK_THROWS_AS(parse_three_dm(R"({"q": 1, "A": ["x"], "triples": [["z","u","p"]]})"), ParseError);
    CHECK_THROWS_AS(parse_three_dm(R"({"triples": []})"), ParseError);

    ThreeDMInstance crowded;
    crowded.q = 1;
    crowded.labels = {"a", "b", "c"};
    crowded.triples.assign(4, {0, 1, 2});
    CHECK_THROWS_AS(crowded.validate(), std::domain_error);
}

TEST_CASE("maximum matching by search") {
    ThreeDMInstance tdm;
    tdm.q = 2;
    tdm.labels = {"a1", "a2", "b1", "b2", "c1", "c2"};
    tdm.triples = {{0, 2, 4}, {0, 3, 5}, {1, 3, 4}};
    CHECK(max_three_dm(tdm) == 1);
    tdm.triples.push_back({1, 3, 5});
    CHECK(max_three_dm(tdm) == 2);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) CHECK(max_three_dm(planted_three_dm(4, 6, seed)) == 4);
}

}  // TEST_SUITE
