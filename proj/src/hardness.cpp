#include "speedscale/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "speedscale/errors.hpp"

namespace speedscale {

namespace {

constexpr int kRoleCount = 3;
const Rational kHorizon = 3;

double load_energy(const std::map<std::string, Rational>& load, double alpha) {
    double total = 0.0;
    for (const auto& [m, l] : load) total += std::pow(l.to_double(), alpha) / std::pow(3.0, alpha - 1);
    return total;
}

std::map<std::string, Rational> loads_of(const ReductionArtifacts& art, const std::vector<std::string>& machine_of_job) {
    std::map<std::string, Rational> load;
    for (const auto& p : art.instance.processors) load[p.id] = 0;
    for (std::size_t k = 0; k < machine_of_job.size(); ++k) {
        const auto& job = art.instance.jobs[art.instance.index_of(static_cast<int>(k) + 1)];
        load[machine_of_job[k]] += job.work.at(machine_of_job[k]);
    }
    return load;
}

bool triple_contains(const ThreeDMInstance& tdm, int triple, int element) {
    const auto& t = tdm.triples[triple];
    return t[0] == element || t[1] == element || t[2] == element;
}

int best_matching(const ThreeDMInstance& tdm, std::size_t next, std::vector<bool>& used, int size, int best) {
    if (next == tdm.triples.size()) return std::max(best, size);
    if (size + static_cast<int>(tdm.triples.size() - next) <= best || best == tdm.q) return best;
    const auto& t = tdm.triples[next];
    if (!used[t[0]] && !used[t[1]] && !used[t[2]]) {
        for (int e : t) used[e] = true;
        best = best_matching(tdm, next + 1, used, size + 1, best);
        for (int e : t) used[e] = false;
    }
    return best_matching(tdm, next + 1, used, size, best);
}

}  // namespace

void ThreeDMInstance::validate() const {
    if (q < 1) throw std::domain_error("q must be at least 1");
    if (static_cast<int>(labels.size()) != 3 * q) throw std::domain_error("expected 3q element labels");
    for (std::size_t k = 0; k < triples.size(); ++k)
        for (int role = 0; role < kRoleCount; ++role) {
            const int e = triples[k][role];
            if (e < role * q || e >= (role + 1) * q)
                throw std::domain_error("triple " + std::to_string(k) + " has an element outside set " + std::string(1, "ABC"[role]));
        }
    const auto occ = occurrences();
    for (int e = 0; e < 3 * q; ++e) {
        if (occ[e] < 1) throw std::domain_error("element " + labels[e] + " occurs in no triple");
        if (occ[e] > 3) throw std::domain_error("element " + labels[e] + " occurs in " + std::to_string(occ[e]) + " triples (at most 3)");
    }
}

std::vector<int> ThreeDMInstance::occurrences() const {
    std::vector<int> occ(labels.size(), 0);
    for (const auto& t : triples)
        for (int e : t)
            if (e >= 0 && e < static_cast<int>(occ.size())) ++occ[e];
    return occ;
}

ThreeDMInstance parse_three_dm(std::string_view text) {
    const Json doc = parse_json(text);
    if (!doc.is_object()) throw ParseError("", "3DM document must be an object");
    if (!doc.contains("q") || !doc["q"].is_number_integer() || doc["q"].get<int>() < 1) throw ParseError("q", "expected a positive integer");
    if (!doc.contains("triples") || !doc["triples"].is_array()) throw ParseError("triples", "expected an array");
    ThreeDMInstance tdm;
    tdm.q = doc["q"].get<int>();
    std::array<std::vector<std::string>, 3> names;
    const char* keys[] = {"A", "B", "C"};
    for (int role = 0; role < kRoleCount; ++role) {
        if (!doc.contains(keys[role])) continue;
        const auto& arr = doc[keys[role]];
        if (!arr.is_array()) throw ParseError(keys[role], "expected an array of names");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            if (!arr[k].is_string()) throw ParseError(std::string(keys[role]) + "[" + std::to_string(k) + "]", "expected a string");
            names[role].push_back(arr[k].get<std::string>());
        }
    }
    std::array<bool, 3> fixed{!names[0].empty(), !names[1].empty(), !names[2].empty()};
    std::vector<std::array<std::string, 3>> raw;
    for (std::size_t k = 0; k < doc["triples"].size(); ++k) {
        const auto& t = doc["triples"][k];
        const std::string path = "triples[" + std::to_string(k) + "]";
        if (!t.is_array() || t.size() != 3) throw ParseError(path, "expected three names");
        std::array<std::string, 3> r;
        for (int role = 0; role < kRoleCount; ++role) {
            if (!t[role].is_string()) throw ParseError(path + "[" + std::to_string(role) + "]", "expected a string");
            r[role] = t[role].get<std::string>();
            auto& list = names[role];
            if (std::find(list.begin(), list.end(), r[role]) == list.end()) {
                if (fixed[role]) throw ParseError(path + "[" + std::to_string(role) + "]", "'" + r[role] + "' is not listed in " + keys[role]);
                list.push_back(r[role]);
            }
        }
        raw.push_back(r);
    }
    for (int role = 0; role < kRoleCount; ++role)
        if (static_cast<int>(names[role].size()) != tdm.q)
            throw ParseError(keys[role], "has " + std::to_string(names[role].size()) + " elements, expected q = " + std::to_string(tdm.q));
    for (int role = 0; role < kRoleCount; ++role) tdm.labels.insert(tdm.labels.end(), names[role].begin(), names[role].end());
    for (const auto& r : raw) {
        std::array<int, 3> t{};
        for (int role = 0; role < kRoleCount; ++role)
            t[role] = role * tdm.q + static_cast<int>(std::find(names[role].begin(), names[role].end(), r[role]) - names[role].begin());
        tdm.triples.push_back(t);
    }
    return tdm;
}

Json three_dm_to_json(const ThreeDMInstance& tdm) {
    Json doc;
    doc["q"] = tdm.q;
    const char* keys[] = {"A", "B", "C"};
    for (int role = 0; role < kRoleCount; ++role) {
        Json arr = Json::array();
        for (int k = 0; k < tdm.q; ++k) arr.push_back(tdm.labels[role * tdm.q + k]);
        doc[keys[role]] = arr;
    }
    Json triples = Json::array();
    for (const auto& t : tdm.triples) triples.push_back({tdm.labels[t[0]], tdm.labels[t[1]], tdm.labels[t[2]]});
    doc["triples"] = triples;
    return doc;
}

ThreeDMInstance planted_three_dm(int q, int distractors, std::uint64_t seed) {
    if (q < 1) throw std::domain_error("q must be at least 1");
    Rng rng(seed);
    ThreeDMInstance tdm;
    tdm.q = q;
    for (char c : {'a', 'b', 'c'})
        for (int k = 1; k <= q; ++k) tdm.labels.push_back(std::string(1, c) + std::to_string(k));
    auto permutation = [&]() {
        std::vector<int> p(q);
        for (int k = 0; k < q; ++k) p[k] = k;
        for (int k = q - 1; k > 0; --k) std::swap(p[k], p[rng.uniform_int(0, k)]);
        return p;
    };
    const auto pb = permutation(), pc = permutation();
    for (int k = 0; k < q; ++k) tdm.triples.push_back({k, q + pb[k], 2 * q + pc[k]});
    std::vector<int> occ(3 * q, 1);
    std::set<std::array<int, 3>> seen(tdm.triples.begin(), tdm.triples.end());
    for (int k = 0; k < distractors; ++k) {
        const std::array<int, 3> t{static_cast<int>(rng.uniform_int(0, q - 1)), static_cast<int>(q + rng.uniform_int(0, q - 1)),
                                   static_cast<int>(2 * q + rng.uniform_int(0, q - 1))};
        if (seen.count(t) || occ[t[0]] >= 3 || occ[t[1]] >= 3 || occ[t[2]] >= 3) continue;
        seen.insert(t);
        for (int e : t) ++occ[e];
        tdm.triples.push_back(t);
    }
    for (std::size_t k = tdm.triples.size() - 1; k > 0; --k)
        std::swap(tdm.triples[k], tdm.triples[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(k)))]);
    tdm.validate();
    return tdm;
}

int max_three_dm(const ThreeDMInstance& tdm) {
    tdm.validate();
    if (tdm.triples.size() > 40) throw SizeLimitError("exhaustive 3DM search is limited to 40 triples");
    std::vector<bool> used(tdm.labels.size(), false);
    return best_matching(tdm, 0, used, 0, 0);
}

bool ReductionArtifacts::is_element_job(int job) const { return job >= 1 && job <= 3 * q; }

int ReductionArtifacts::element_of(int job) const { return is_element_job(job) ? job - 1 : -1; }

int ReductionArtifacts::triple_of(const std::string& machine) const {
    const auto it = std::find(triple_machine.begin(), triple_machine.end(), machine);
    return it == triple_machine.end() ? -1 : static_cast<int>(it - triple_machine.begin());
}

ReductionArtifacts reduce_three_dm(const ThreeDMInstance& tdm, double alpha) {
    tdm.validate();
    ReductionArtifacts art;
    art.q = tdm.q;
    art.source = tdm;
    art.instance.alpha = alpha;
    const int machines = 3 * tdm.q;
    for (std::size_t k = 0; k < tdm.triples.size(); ++k) {
        art.triple_machine.push_back("t" + std::to_string(k + 1));
        art.instance.processors.push_back({art.triple_machine.back(), alpha});
    }
    for (int k = 1; k <= machines - static_cast<int>(tdm.triples.size()); ++k) {
        art.dummy_machines.push_back("d" + std::to_string(k));
        art.instance.processors.push_back({art.dummy_machines.back(), alpha});
    }
    for (int e = 0; e < 3 * tdm.q; ++e) {
        HeterogeneousJob job;
        job.id = e + 1;
        job.life = {0, kHorizon};
        for (const auto& p : art.instance.processors) {
            const int t = art.triple_of(p.id);
            job.work[p.id] = (t >= 0 && triple_contains(tdm, t, e)) ? 1 : 4;
        }
        art.element_job.push_back(job.id);
        art.instance.jobs.push_back(std::move(job));
    }
    for (int k = 0; k < 2 * tdm.q; ++k) {
        HeterogeneousJob job;
        job.id = 3 * tdm.q + k + 1;
        job.life = {0, kHorizon};
        for (const auto& p : art.instance.processors) job.work[p.id] = 3;
        art.dummy_jobs.push_back(job.id);
        art.instance.jobs.push_back(std::move(job));
    }
    art.instance.validate();
    return art;
}

Schedule balanced_schedule(const ReductionArtifacts& art, const std::vector<std::string>& machine_of_job) {
    if (machine_of_job.size() != art.instance.jobs.size()) throw std::invalid_argument("one machine per job expected");
    const auto load = loads_of(art, machine_of_job);
    std::map<std::string, Rational> cursor;
    Schedule s;
    for (std::size_t k = 0; k < machine_of_job.size(); ++k) {
        const std::string& m = machine_of_job[k];
        const int id = static_cast<int>(k) + 1;
        const Rational w = art.instance.jobs[art.instance.index_of(id)].work.at(m);
        const Rational start = cursor[m];
        const Rational end = start + kHorizon * w / load.at(m);
        s.assignments.push_back({id, m, {start, end}});
        cursor[m] = end;
    }
    s.sort();
    return s;
}

RepairResult repair_schedule(const Schedule& schedule, const ReductionArtifacts& art) {
    if (const auto v = validate_schedule(schedule, art.instance); !v.empty())
        throw std::domain_error("schedule is invalid for the reduced instance: " + v.front().message);
    RepairResult out;
    out.machine_of_job.resize(art.instance.jobs.size());
    for (const auto& a : schedule.assignments) out.machine_of_job[a.job - 1] = a.processor;
    const auto& tdm = art.source;
    const double alpha = art.instance.alpha;
    auto& where = out.machine_of_job;
    auto work_on = [&](int id, const std::string& m) { return art.instance.jobs[art.instance.index_of(id)].work.at(m); };

    for (int e = 0; e < 3 * art.q; ++e) {
        const int job = art.element_job[e];
        const std::string from = where[job - 1];
        const int current = art.triple_of(from);
        if (current >= 0 && triple_contains(tdm, current, e)) continue;
        int target = -1;
        for (std::size_t t = 0; t < tdm.triples.size() && target < 0; ++t)
            if (triple_contains(tdm, static_cast<int>(t), e)) target = static_cast<int>(t);
        const std::string& to = art.triple_machine[target];
        RepairStep step{job, from, to, 0, load_energy(loads_of(art, where), alpha), 0.0};
        for (std::size_t k = 0; k < where.size() && step.swapped_with == 0; ++k) {
            const int other = static_cast<int>(k) + 1;
            if (where[k] != to || other == job) continue;
            if (!art.is_element_job(other) || work_on(other, to) == 4) step.swapped_with = other;
        }
        if (step.swapped_with != 0) where[step.swapped_with - 1] = from;
        where[job - 1] = to;
        step.load_energy_after = load_energy(loads_of(art, where), alpha);
        if (step.load_energy_after > step.load_energy_before * (1 + 1e-12))
            throw ContractViolation("repair step for job " + std::to_string(job) + " raised the load energy");
        out.steps.push_back(step);
    }
    out.schedule = balanced_schedule(art, where);
    return out;
}

std::vector<int> extract_matching(const Schedule& schedule, const ReductionArtifacts& art) {
    const RepairResult r = repair_schedule(schedule, art);
    std::vector<int> matching;
    for (std::size_t t = 0; t < art.source.triples.size(); ++t) {
        bool all = true;
        for (int e : art.source.triples[t]) all = all && r.machine_of_job[art.element_job[e] - 1] == art.triple_machine[t];
        if (all) matching.push_back(static_cast<int>(t));
    }
    return matching;
}

double gap_beta(double alpha) {
    if (!(alpha > 1.0)) throw std::domain_error("alpha must be > 1");
    const double spread = (std::pow(2.0, alpha) + std::pow(4.0, alpha)) / 2 - std::pow(3.0, alpha);
    return std::pow(3.0, alpha - 1) / (1.5 * spread);
}

GapReport verify_gap_inequality(const ReductionArtifacts& art, const Schedule& schedule, int opt_source, double opt_reduced, double tolerance) {
    GapReport report;
    report.energy = energy_of_schedule(schedule, art.instance);
    const RepairResult repaired = repair_schedule(schedule, art);
    std::map<std::string, int> elements;
    for (const auto& p : art.instance.processors) elements[p.id] = 0;
    for (int e = 0; e < 3 * art.q; ++e) ++elements[repaired.machine_of_job[art.element_job[e] - 1]];
    for (const auto& [m, k] : elements) {
        if (k > 3) throw ContractViolation("machine " + m + " holds " + std::to_string(k) + " element jobs after repair");
        ++report.machines_with_elements[k];
    }
    report.matching_size = static_cast<int>(extract_matching(schedule, art).size());
    report.lhs = opt_source - report.matching_size;
    report.rhs = gap_beta(art.instance.alpha) * (report.energy - opt_reduced);
    report.gap_holds = report.lhs <= report.rhs + tolerance * (1.0 + report.energy);
    report.opt_bound_holds = opt_reduced <= 9.0 * opt_source * (1.0 + tolerance) + tolerance;
    return report;
}

}  // namespace speedscale
