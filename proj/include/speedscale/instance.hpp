#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "speedscale/rational.hpp"

namespace speedscale {

/// Closed time interval [start, end] with exact endpoints.
struct Interval {
    Rational start;
    Rational end;

    [[nodiscard]] Rational length() const { return end - start; }
    [[nodiscard]] Rational midpoint() const { return (start + end) / 2; }
    friend bool operator==(const Interval&, const Interval&) = default;
    friend auto operator<=>(const Interval&, const Interval&) = default;
};

/// True when the open interiors of `a` and `b` overlap. Touching endpoints do not count.
bool interiors_intersect(const Interval& a, const Interval& b);
/// True when `inner` is a subset of the closed interval `outer`.
bool contains(const Interval& outer, const Interval& inner);
/// True when t lies strictly inside `iv`.
bool interior_contains(const Interval& iv, const Rational& t);

struct Job {
    int id = 0;
    Rational release;
    Rational deadline;
    Rational work;

    [[nodiscard]] Interval life() const { return {release, deadline}; }
};

/// Identical-processor instance: m processors sharing the exponent alpha.
struct Instance {
    double alpha = 2.0;
    int processors = 1;
    std::vector<Job> jobs;

    /// Throws std::domain_error on alpha <= 1, m < 1, duplicate ids, r >= d or w <= 0.
    void validate() const;
    [[nodiscard]] std::size_t index_of(int job_id) const;
    /// [min release, max deadline].
    [[nodiscard]] Interval span() const;
    [[nodiscard]] Rational max_work() const;
    [[nodiscard]] Rational min_work() const;

    static std::string processor_name(int index) { return "p" + std::to_string(index + 1); }
};

struct ProcessorSpec {
    std::string id;
    double alpha = 2.0;
};

/// A job whose work (and optionally life interval) depends on the processor.
/// A processor missing from `work` cannot run the job.
struct HeterogeneousJob {
    int id = 0;
    Interval life;
    std::map<std::string, Rational> work;
    std::map<std::string, Interval> life_per_processor;

    [[nodiscard]] Interval life_on(const std::string& processor) const;
};

struct HeterogeneousInstance {
    double alpha = 2.0;
    std::vector<ProcessorSpec> processors;
    std::vector<HeterogeneousJob> jobs;

    void validate() const;
    [[nodiscard]] std::size_t index_of(int job_id) const;
    [[nodiscard]] std::size_t processor_index(const std::string& id) const;
    [[nodiscard]] Interval span() const;
};

struct Assignment {
    int job = 0;
    /// Empty when the schedule leaves processor choice to the single shared pool.
    std::string processor;
    Interval interval;
};

struct Schedule {
    std::vector<Assignment> assignments;

    [[nodiscard]] const Assignment* find(int job_id) const;
    /// Orders assignments by (processor, start, job) for canonical output.
    void sort();
};

/// Dense per-(processor, job) view shared by the validators, energy accounting and oracles.
class ProblemView {
public:
    explicit ProblemView(const Instance& instance);
    explicit ProblemView(const HeterogeneousInstance& instance);

    [[nodiscard]] int num_jobs() const { return static_cast<int>(job_ids_.size()); }
    [[nodiscard]] int num_processors() const { return static_cast<int>(processor_names_.size()); }
    [[nodiscard]] int job_id(int j) const { return job_ids_[j]; }
    [[nodiscard]] std::optional<int> job_index(int id) const;
    [[nodiscard]] const std::string& processor_name(int p) const { return processor_names_[p]; }
    [[nodiscard]] std::optional<int> processor_index(const std::string& name) const;
    [[nodiscard]] double alpha(int p) const { return alphas_[p]; }
    [[nodiscard]] bool runnable(int p, int j) const { return cell(p, j).has_value(); }
    [[nodiscard]] const Interval& window(int p, int j) const { return cell(p, j)->window; }
    [[nodiscard]] const Rational& work(int p, int j) const { return cell(p, j)->work; }
    /// All processors expose the same window and work for every job.
    [[nodiscard]] bool identical_processors() const { return identical_; }
    [[nodiscard]] int pool_capacity() const { return num_processors(); }
    /// Union of the job's windows over all processors.
    [[nodiscard]] Interval life(int j) const { return lives_[j]; }
    [[nodiscard]] Interval span() const;

private:
    struct Cell {
        Interval window;
        Rational work;
    };
    [[nodiscard]] const std::optional<Cell>& cell(int p, int j) const { return cells_[p * job_ids_.size() + j]; }

    std::vector<int> job_ids_;
    std::vector<std::string> processor_names_;
    std::vector<double> alphas_;
    std::vector<std::optional<Cell>> cells_;
    std::vector<Interval> lives_;
    bool identical_ = true;
};

/// Energy of running `work` at constant speed over `length`: work^alpha / length^(alpha-1).
double energy_of_job(double work, double length, double alpha);
double energy_of_job(const Rational& work, const Rational& length, double alpha);

/// Energy after stretching/shrinking a constant-speed execution from len_old to len_new.
double rescale_energy(double energy_old, double len_old, double len_new, double alpha);

struct Violation {
    enum class Kind { kUnknownJob, kDuplicateJob, kMissingJob, kUnknownProcessor, kNotRunnable, kEmptyInterval, kOutsideLife, kOverlap, kPoolOverload };
    Kind kind;
    std::vector<int> jobs;
    std::string message;
};

std::string to_string(Violation::Kind kind);

/// Reports every breach of the schedule invariants; never throws.
std::vector<Violation> validate_schedule(const Schedule& schedule, const ProblemView& problem);
std::vector<Violation> validate_schedule(const Schedule& schedule, const Instance& instance);
std::vector<Violation> validate_schedule(const Schedule& schedule, const HeterogeneousInstance& instance);

/// Thrown by energy_of_schedule for invalid schedules.
class ScheduleError : public std::runtime_error {
public:
    explicit ScheduleError(std::vector<Violation> violations);
    [[nodiscard]] const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

double energy_of_schedule(const Schedule& schedule, const ProblemView& problem);
double energy_of_schedule(const Schedule& schedule, const Instance& instance);
double energy_of_schedule(const Schedule& schedule, const HeterogeneousInstance& instance);

/// Per-job energies keyed by job id (no validation).
std::map<int, double> job_energies(const Schedule& schedule, const ProblemView& problem);

/// n unit jobs on [i-1, i] plus one job of work n on [0, n]; single processor.
Instance generate_gap_family(int n, double alpha);

struct RandomInstanceOptions {
    int jobs = 4;
    int processors = 1;
    double alpha = 2.0;
    std::uint64_t seed = 1;
    Rational work_min = 1;
    Rational work_max = 4;
    /// Releases and deadlines are integers in [0, horizon].
    int horizon = 6;
};

/// Seeded instance generator; works are integers in [work_min, work_max]
/// (or exactly work_min when the range is a single point).
Instance generate_random(const RandomInstanceOptions& options);

/// Seeded draws on top of std::mt19937_64. The bounded draws are done here
/// (not with <random> distributions) so streams match across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    /// Uniform double in [0, 1).
    double uniform01();

private:
    std::mt19937_64 engine_;
};

}  // namespace speedscale
