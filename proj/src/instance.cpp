#include "speedscale/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace speedscale {

bool interiors_intersect(const Interval& a, const Interval& b) { return a.start < b.end && b.start < a.end; }

bool contains(const Interval& outer, const Interval& inner) { return outer.start <= inner.start && inner.end <= outer.end; }

bool interior_contains(const Interval& iv, const Rational& t) { return iv.start < t && t < iv.end; }

// ---------------------------------------------------------------- Instance

void Instance::validate() const {
    if (!(alpha > 1.0) || !std::isfinite(alpha)) throw std::domain_error("alpha must be > 1");
    if (processors < 1) throw std::domain_error("processor count must be >= 1");
    std::set<int> ids;
    for (const auto& job : jobs) {
        if (!ids.insert(job.id).second) throw std::domain_error("duplicate job id " + std::to_string(job.id));
        if (!(job.release < job.deadline)) throw std::domain_error("job " + std::to_string(job.id) + ": release must precede deadline");
        if (!(job.work > 0)) throw std::domain_error("job " + std::to_string(job.id) + ": work must be positive");
    }
}

std::size_t Instance::index_of(int job_id) const {
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].id == job_id) return i;
    throw std::out_of_range("unknown job id " + std::to_string(job_id));
}

Interval Instance::span() const {
    if (jobs.empty()) return {0, 0};
    Interval s = jobs.front().life();
    for (const auto& j : jobs) {
        s.start = min(s.start, j.release);
        s.end = max(s.end, j.deadline);
    }
    return s;
}

Rational Instance::max_work() const {
    Rational w = 0;
    for (const auto& j : jobs) w = max(w, j.work);
    return w;
}

Rational Instance::min_work() const {
    if (jobs.empty()) return 0;
    Rational w = jobs.front().work;
    for (const auto& j : jobs) w = min(w, j.work);
    return w;
}

// --------------------------------------------------- HeterogeneousInstance

Interval HeterogeneousJob::life_on(const std::string& processor) const {
    if (auto it = life_per_processor.find(processor); it != life_per_processor.end()) return it->second;
    return life;
}

void HeterogeneousInstance::validate() const {
    if (!(alpha > 1.0) || !std::isfinite(alpha)) throw std::domain_error("alpha must be > 1");
    if (processors.empty()) throw std::domain_error("at least one processor required");
    std::set<std::string> names;
    for (const auto& p : processors) {
        if (!names.insert(p.id).second) throw std::domain_error("duplicate processor id " + p.id);
        if (!(p.alpha > 1.0) || p.alpha > alpha) throw std::domain_error("processor " + p.id + ": alpha must lie in (1, instance alpha]");
    }
    std::set<int> ids;
    for (const auto& job : jobs) {
        const std::string tag = "job " + std::to_string(job.id);
        if (!ids.insert(job.id).second) throw std::domain_error("duplicate job id " + std::to_string(job.id));
        if (!(job.life.start < job.life.end)) throw std::domain_error(tag + ": release must precede deadline");
        bool schedulable = false;
        for (const auto& [proc, w] : job.work) {
            if (!names.count(proc)) throw std::domain_error(tag + ": unknown processor " + proc);
            if (!(w > 0)) throw std::domain_error(tag + ": work must be positive");
            if (job.life_on(proc).start < job.life_on(proc).end) schedulable = true;
        }
        for (const auto& [proc, iv] : job.life_per_processor) {
            if (!names.count(proc)) throw std::domain_error(tag + ": unknown processor " + proc);
            if (!(iv.start < iv.end)) throw std::domain_error(tag + ": empty life interval on " + proc);
        }
        if (!schedulable) throw std::domain_error(tag + ": no processor can run it");
    }
}

std::size_t HeterogeneousInstance::index_of(int job_id) const {
    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].id == job_id) return i;
    throw std::out_of_range("unknown job id " + std::to_string(job_id));
}

std::size_t HeterogeneousInstance::processor_index(const std::string& id) const {
    for (std::size_t i = 0; i < processors.size(); ++i)
        if (processors[i].id == id) return i;
    throw std::out_of_range("unknown processor " + id);
}

Interval HeterogeneousInstance::span() const {
    if (jobs.empty()) return {0, 0};
    Interval s = jobs.front().life;
    for (const auto& j : jobs) {
        s.start = min(s.start, j.life.start);
        s.end = max(s.end, j.life.end);
        for (const auto& [_, iv] : j.life_per_processor) {
            s.start = min(s.start, iv.start);
            s.end = max(s.end, iv.end);
        }
    }
    return s;
}

// ---------------------------------------------------------------- Schedule

const Assignment* Schedule::find(int job_id) const {
    for (const auto& a : assignments)
        if (a.job == job_id) return &a;
    return nullptr;
}

void Schedule::sort() {
    std::sort(assignments.begin(), assignments.end(), [](const Assignment& a, const Assignment& b) {
        if (a.processor != b.processor) return a.processor < b.processor;
        if (a.interval.start != b.interval.start) return a.interval.start < b.interval.start;
        return a.job < b.job;
    });
}

// ------------------------------------------------------------- ProblemView

ProblemView::ProblemView(const Instance& instance) {
    const int m = instance.processors;
    for (const auto& j : instance.jobs) {
        job_ids_.push_back(j.id);
        lives_.push_back(j.life());
    }
    for (int p = 0; p < m; ++p) {
        processor_names_.push_back(Instance::processor_name(p));
        alphas_.push_back(instance.alpha);
        for (const auto& j : instance.jobs) cells_.push_back(Cell{j.life(), j.work});
    }
}

ProblemView::ProblemView(const HeterogeneousInstance& instance) {
    for (const auto& j : instance.jobs) job_ids_.push_back(j.id);
    lives_.resize(instance.jobs.size());
    std::vector<bool> seen(instance.jobs.size(), false);
    for (const auto& p : instance.processors) {
        processor_names_.push_back(p.id);
        alphas_.push_back(p.alpha);
        for (std::size_t j = 0; j < instance.jobs.size(); ++j) {
            const auto& job = instance.jobs[j];
            auto it = job.work.find(p.id);
            if (it == job.work.end()) {
                cells_.emplace_back(std::nullopt);
                continue;
            }
            const Interval window = job.life_on(p.id);
            cells_.push_back(Cell{window, it->second});
            if (!seen[j]) {
                lives_[j] = window;
                seen[j] = true;
            } else {
                lives_[j].start = min(lives_[j].start, window.start);
                lives_[j].end = max(lives_[j].end, window.end);
            }
        }
    }
    for (std::size_t j = 0; j < instance.jobs.size(); ++j)
        if (!seen[j]) lives_[j] = instance.jobs[j].life;
    const std::size_t n = job_ids_.size();
    for (std::size_t p = 1; p < processor_names_.size() && identical_; ++p) {
        if (alphas_[p] != alphas_[0]) identical_ = false;
        for (std::size_t j = 0; j < n && identical_; ++j) {
            const auto& a = cells_[j];
            const auto& b = cells_[p * n + j];
            if (a.has_value() != b.has_value()) identical_ = false;
            else if (a && (a->window != b->window || a->work != b->work)) identical_ = false;
        }
    }
}

std::optional<int> ProblemView::job_index(int id) const {
    for (std::size_t i = 0; i < job_ids_.size(); ++i)
        if (job_ids_[i] == id) return static_cast<int>(i);
    return std::nullopt;
}

std::optional<int> ProblemView::processor_index(const std::string& name) const {
    for (std::size_t i = 0; i < processor_names_.size(); ++i)
        if (processor_names_[i] == name) return static_cast<int>(i);
    return std::nullopt;
}

Interval ProblemView::span() const {
    if (lives_.empty()) return {0, 0};
    Interval s = lives_.front();
    for (const auto& l : lives_) {
        s.start = min(s.start, l.start);
        s.end = max(s.end, l.end);
    }
    return s;
}

// ------------------------------------------------------------------ Energy

double energy_of_job(double work, double length, double alpha) {
    if (!(length > 0.0)) throw std::domain_error("execution length must be positive");
    if (!(work > 0.0)) throw std::domain_error("work must be positive");
    if (!(alpha > 1.0)) throw std::domain_error("alpha must be > 1");
    return std::pow(work, alpha) / std::pow(length, alpha - 1.0);
}

double energy_of_job(const Rational& work, const Rational& length, double alpha) {
    return energy_of_job(work.to_double(), length.to_double(), alpha);
}

double rescale_energy(double energy_old, double len_old, double len_new, double alpha) {
    if (!(len_old > 0.0) || !(len_new > 0.0)) throw std::domain_error("interval lengths must be positive");
    return energy_old * std::pow(len_old / len_new, alpha - 1.0);
}

// -------------------------------------------------------------- Validation

std::string to_string(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::kUnknownJob: return "unknown_job";
        case Violation::Kind::kDuplicateJob: return "duplicate_job";
        case Violation::Kind::kMissingJob: return "missing_job";
        case Violation::Kind::kUnknownProcessor: return "unknown_processor";
        case Violation::Kind::kNotRunnable: return "not_runnable";
        case Violation::Kind::kEmptyInterval: return "empty_interval";
        case Violation::Kind::kOutsideLife: return "outside_life";
        case Violation::Kind::kOverlap: return "overlap";
        case Violation::Kind::kPoolOverload: return "pool_overload";
    }
    return "unknown";
}

std::vector<Violation> validate_schedule(const Schedule& schedule, const ProblemView& problem) {
    std::vector<Violation> out;
    using K = Violation::Kind;
    std::vector<int> count(problem.num_jobs(), 0);
    // Per-processor buckets; index num_processors() holds unassigned (pool) entries.
    std::vector<std::vector<const Assignment*>> buckets(problem.num_processors() + 1);
    bool any_pool = false;

    for (const auto& a : schedule.assignments) {
        const auto j = problem.job_index(a.job);
        if (!j) {
            out.push_back({K::kUnknownJob, {a.job}, "job " + std::to_string(a.job) + " is not part of the instance"});
            continue;
        }
        if (++count[*j] > 1) out.push_back({K::kDuplicateJob, {a.job}, "job " + std::to_string(a.job) + " is assigned more than once"});
        if (!(a.interval.start < a.interval.end)) {
            out.push_back({K::kEmptyInterval, {a.job}, "job " + std::to_string(a.job) + " has an empty execution interval"});
        }
        if (a.processor.empty()) {
            any_pool = true;
            if (!contains(problem.life(*j), a.interval))
                out.push_back({K::kOutsideLife, {a.job}, "job " + std::to_string(a.job) + " runs outside its life interval"});
            buckets.back().push_back(&a);
            continue;
        }
        const auto p = problem.processor_index(a.processor);
        if (!p) {
            out.push_back({K::kUnknownProcessor, {a.job}, "job " + std::to_string(a.job) + " assigned to unknown processor " + a.processor});
            continue;
        }
        if (!problem.runnable(*p, *j)) {
            out.push_back({K::kNotRunnable, {a.job}, "job " + std::to_string(a.job) + " cannot run on " + a.processor});
            continue;
        }
        if (!contains(problem.window(*p, *j), a.interval))
            out.push_back({K::kOutsideLife, {a.job}, "job " + std::to_string(a.job) + " runs outside its life interval on " + a.processor});
        buckets[*p].push_back(&a);
    }
    for (int j = 0; j < problem.num_jobs(); ++j)
        if (count[j] == 0) out.push_back({K::kMissingJob, {problem.job_id(j)}, "job " + std::to_string(problem.job_id(j)) + " is not scheduled"});

    for (int p = 0; p < problem.num_processors(); ++p) {
        const auto& b = buckets[p];
        for (std::size_t x = 0; x < b.size(); ++x)
            for (std::size_t y = x + 1; y < b.size(); ++y)
                if (interiors_intersect(b[x]->interval, b[y]->interval))
                    out.push_back({K::kOverlap, {b[x]->job, b[y]->job},
                                   "jobs " + std::to_string(b[x]->job) + " and " + std::to_string(b[y]->job) + " overlap on " + problem.processor_name(p)});
    }

    if (any_pool) {
        // Sweep: no point may be covered by more intervals than there are processors.
        std::vector<std::pair<Rational, int>> events;
        for (const auto& bucket : buckets)
            for (const auto* a : bucket) {
                if (!(a->interval.start < a->interval.end)) continue;
                events.emplace_back(a->interval.start, +1);
                events.emplace_back(a->interval.end, -1);
            }
        std::sort(events.begin(), events.end());  // ends (-1) sort before starts at equal times
        int depth = 0;
        for (const auto& [t, delta] : events) {
            depth += delta;
            if (depth > problem.pool_capacity()) {
                out.push_back({K::kPoolOverload, {}, "more than " + std::to_string(problem.pool_capacity()) + " jobs run at time " + t.str()});
                break;
            }
        }
    }
    return out;
}

std::vector<Violation> validate_schedule(const Schedule& schedule, const Instance& instance) {
    return validate_schedule(schedule, ProblemView(instance));
}

std::vector<Violation> validate_schedule(const Schedule& schedule, const HeterogeneousInstance& instance) {
    return validate_schedule(schedule, ProblemView(instance));
}

ScheduleError::ScheduleError(std::vector<Violation> violations)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "invalid schedule:";
          for (const auto& v : violations) os << " [" << to_string(v.kind) << "] " << v.message << ";";
          return os.str();
      }()),
      violations_(std::move(violations)) {}

std::map<int, double> job_energies(const Schedule& schedule, const ProblemView& problem) {
    std::map<int, double> out;
    for (const auto& a : schedule.assignments) {
        const auto j = problem.job_index(a.job);
        if (!j) continue;
        int p = 0;
        if (!a.processor.empty()) {
            const auto pi = problem.processor_index(a.processor);
            if (!pi) continue;
            p = *pi;
        }
        if (!problem.runnable(p, *j)) continue;
        out[a.job] = energy_of_job(problem.work(p, *j), a.interval.length(), problem.alpha(p));
    }
    return out;
}

double energy_of_schedule(const Schedule& schedule, const ProblemView& problem) {
    if (auto violations = validate_schedule(schedule, problem); !violations.empty()) throw ScheduleError(std::move(violations));
    double total = 0.0;
    for (const auto& [_, e] : job_energies(schedule, problem)) total += e;
    return total;
}

double energy_of_schedule(const Schedule& schedule, const Instance& instance) {
    return energy_of_schedule(schedule, ProblemView(instance));
}

double energy_of_schedule(const Schedule& schedule, const HeterogeneousInstance& instance) {
    return energy_of_schedule(schedule, ProblemView(instance));
}

// -------------------------------------------------------------- Generators

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::domain_error("empty integer range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Instance generate_gap_family(int n, double alpha) {
    if (n < 1) throw std::domain_error("gap family needs n >= 1");
    Instance inst;
    inst.alpha = alpha;
    inst.processors = 1;
    for (int i = 1; i <= n; ++i) inst.jobs.push_back(Job{i, i - 1, i, 1});
    inst.jobs.push_back(Job{n + 1, 0, n, n});
    inst.validate();
    return inst;
}

Instance generate_random(const RandomInstanceOptions& o) {
    if (o.jobs < 1 || o.processors < 1) throw std::domain_error("random instance needs n >= 1 and m >= 1");
    if (o.horizon < 1) throw std::domain_error("horizon must be >= 1");
    if (o.work_max < o.work_min || !(o.work_min > 0)) throw std::domain_error("work range must be a nonempty positive range");
    Rng rng(o.seed);
    Instance inst;
    inst.alpha = o.alpha;
    inst.processors = o.processors;
    for (int i = 0; i < o.jobs; ++i) {
        const auto r = rng.uniform_int(0, o.horizon - 1);
        const auto d = rng.uniform_int(r + 1, o.horizon);
        Rational w = o.work_min;
        if (o.work_max != o.work_min) {
            // Integers inside the range; falls back to the endpoints when the range holds none.
            const auto lo = static_cast<std::int64_t>(std::ceil(o.work_min.to_double()));
            const auto hi = static_cast<std::int64_t>(std::floor(o.work_max.to_double()));
            if (lo <= hi) w = rng.uniform_int(lo, hi);
            else w = rng.uniform_int(0, 1) ? o.work_max : o.work_min;
        }
        inst.jobs.push_back(Job{i + 1, r, d, w});
    }
    inst.validate();
    return inst;
}

}  // namespace speedscale
