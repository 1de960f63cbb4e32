#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "speedscale/json_io.hpp"

namespace speedscale {

/// Three-dimensional matching over A x B x C with |A| = |B| = |C| = q.
/// Elements are indices: A is 0..q-1, B is q..2q-1, C is 2q..3q-1.
struct ThreeDMInstance {
    int q = 0;
    std::vector<std::string> labels;           ///< 3q element names, A then B then C
    std::vector<std::array<int, 3>> triples;  ///< element indices (a, b, c)

    /// Throws std::domain_error unless every element lies in one to three triples
    /// and each triple takes one element from each of A, B and C.
    void validate() const;
    [[nodiscard]] std::vector<int> occurrences() const;
};

/// {"q": 2, "triples": [["a1","b1","c1"], ...]}. A, B and C are the names seen
/// in the first, second and third positions, in order of first appearance;
/// optional "A", "B", "C" arrays fix the order. Throws ParseError.
ThreeDMInstance parse_three_dm(std::string_view text);
Json three_dm_to_json(const ThreeDMInstance& tdm);

/// q hidden disjoint triples plus up to `distractors` random extra triples,
/// never exceeding three occurrences per element.
ThreeDMInstance planted_three_dm(int q, int distractors, std::uint64_t seed);

/// Largest matching size by exhaustive search. Throws SizeLimitError above 40 triples.
int max_three_dm(const ThreeDMInstance& tdm);

/// The scheduling instance built from a 3DM instance, with its role maps.
struct ReductionArtifacts {
    HeterogeneousInstance instance;
    int q = 0;
    std::vector<int> element_job;                ///< job id per element
    std::vector<std::string> triple_machine;     ///< machine id per triple
    std::vector<std::string> dummy_machines;
    std::vector<int> dummy_jobs;
    ThreeDMInstance source;

    [[nodiscard]] bool is_element_job(int job) const;
    /// Element index of an element job; -1 for dummy jobs.
    [[nodiscard]] int element_of(int job) const;
    /// Triple index of a triple machine; -1 for dummy machines.
    [[nodiscard]] int triple_of(const std::string& machine) const;
};

/// 3q machines (one per triple, the rest dummy) and 5q jobs on [0, 3]: an
/// element job has work 1 on machines of triples containing it and 4
/// elsewhere; 2q dummy jobs have work 3 everywhere. Machines are "t<k>" and
/// "d<k>"; element jobs are 1..3q and dummy jobs 3q+1..5q.
ReductionArtifacts reduce_three_dm(const ThreeDMInstance& tdm, double alpha);

/// Each machine runs its jobs back to back over [0, 3] at speed load/3, by job id.
Schedule balanced_schedule(const ReductionArtifacts& artifacts, const std::vector<std::string>& machine_of_job);

struct RepairStep {
    int job = 0;
    std::string from;
    std::string to;
    int swapped_with = 0;  ///< 0 when the job was moved alone
    double load_energy_before = 0.0;
    double load_energy_after = 0.0;
};

struct RepairResult {
    Schedule schedule;
    std::vector<std::string> machine_of_job;  ///< indexed by job id - 1
    std::vector<RepairStep> steps;
};

/// Moves every element job onto the first triple machine containing its
/// element, swapping with a dummy job or a misplaced element job found there,
/// then rebalances every machine. Throws ContractViolation if a step raises
/// the load energy.
RepairResult repair_schedule(const Schedule& schedule, const ReductionArtifacts& artifacts);

/// Triples whose machine runs all three of its element jobs after repair, by index.
std::vector<int> extract_matching(const Schedule& schedule, const ReductionArtifacts& artifacts);

/// 3^(alpha-1) / ((3/2) ((2^alpha + 4^alpha)/2 - 3^alpha)).
double gap_beta(double alpha);

struct GapReport {
    int matching_size = 0;
    std::array<int, 4> machines_with_elements{};  ///< m_0..m_3 after repair
    double energy = 0.0;
    double lhs = 0.0;  ///< OPT(I) - |g(S)|
    double rhs = 0.0;  ///< beta (E(S) - OPT(I'))
    bool gap_holds = false;
    bool opt_bound_holds = false;  ///< OPT(I') <= 9 OPT(I)
    [[nodiscard]] bool ok() const { return gap_holds && opt_bound_holds; }
};

GapReport verify_gap_inequality(const ReductionArtifacts& artifacts, const Schedule& schedule, int opt_source, double opt_reduced,
                                double tolerance = 1e-9);

}  // namespace speedscale
