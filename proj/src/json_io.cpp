#include "speedscale/json_io.hpp"

#include <cmath>

#include "speedscale/errors.hpp"

namespace speedscale {

namespace {

const Json& require(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

int parse_int(const Json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ParseError(path, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) throw ParseError(path, "integer out of range");
    return static_cast<int>(x);
}

double parse_alpha(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path, "expected a number");
    const double a = v.get<double>();
    if (!std::isfinite(a) || !(a > 1.0)) throw ParseError(path, "alpha must be > 1");
    return a;
}

Interval parse_interval(const Json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2) throw ParseError(path, "expected [start, end]");
    Interval iv{rational_from_json(v[0], path + "[0]"), rational_from_json(v[1], path + "[1]")};
    if (!(iv.start < iv.end)) throw ParseError(path, "interval start must precede its end");
    return iv;
}

Json interval_to_json(const Interval& iv) { return Json::array({rational_to_json(iv.start), rational_to_json(iv.end)}); }

bool is_heterogeneous_doc(const Json& doc) {
    if (doc.contains("processors") && doc["processors"].is_array()) return true;
    if (doc.contains("jobs") && doc["jobs"].is_array())
        for (const auto& j : doc["jobs"])
            if (j.is_object() && (j.contains("work_per_processor") || j.contains("life_per_processor"))) return true;
    return false;
}

Instance parse_identical(const Json& doc) {
    Instance inst;
    inst.alpha = parse_alpha(require(doc, "alpha", ""), "alpha");
    inst.processors = doc.contains("processors") ? parse_int(doc["processors"], "processors") : 1;
    if (inst.processors < 1) throw ParseError("processors", "processor count must be >= 1");
    const Json& jobs = require(doc, "jobs", "");
    if (!jobs.is_array()) throw ParseError("jobs", "expected an array");
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const std::string path = "jobs[" + std::to_string(i) + "]";
        const Json& j = jobs[i];
        Job job;
        job.id = parse_int(require(j, "id", path), join(path, "id"));
        job.release = rational_from_json(require(j, "release", path), join(path, "release"));
        job.deadline = rational_from_json(require(j, "deadline", path), join(path, "deadline"));
        job.work = rational_from_json(require(j, "work", path), join(path, "work"));
        if (!(job.release < job.deadline)) throw ParseError(join(path, "deadline"), "release must precede deadline");
        if (!(job.work > 0)) throw ParseError(join(path, "work"), "work must be positive");
        for (const auto& other : inst.jobs)
            if (other.id == job.id) throw ParseError(join(path, "id"), "duplicate job id");
        inst.jobs.push_back(job);
    }
    try {
        inst.validate();
    } catch (const std::domain_error& e) {
        throw ParseError("", e.what());
    }
    return inst;
}

HeterogeneousInstance parse_heterogeneous(const Json& doc) {
    HeterogeneousInstance inst;
    inst.alpha = parse_alpha(require(doc, "alpha", ""), "alpha");
    const Json& procs = require(doc, "processors", "");
    if (procs.is_array()) {
        for (std::size_t i = 0; i < procs.size(); ++i) {
            const std::string path = "processors[" + std::to_string(i) + "]";
            ProcessorSpec p;
            const Json& id = require(procs[i], "id", path);
            if (!id.is_string()) throw ParseError(join(path, "id"), "expected a string");
            p.id = id.get<std::string>();
            p.alpha = procs[i].contains("alpha") ? parse_alpha(procs[i]["alpha"], join(path, "alpha")) : inst.alpha;
            if (p.alpha > inst.alpha) throw ParseError(join(path, "alpha"), "processor alpha exceeds instance alpha");
            inst.processors.push_back(p);
        }
    } else {
        const int m = parse_int(procs, "processors");
        if (m < 1) throw ParseError("processors", "processor count must be >= 1");
        for (int i = 0; i < m; ++i) inst.processors.push_back({Instance::processor_name(i), inst.alpha});
    }
    const Json& jobs = require(doc, "jobs", "");
    if (!jobs.is_array()) throw ParseError("jobs", "expected an array");
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const std::string path = "jobs[" + std::to_string(i) + "]";
        const Json& j = jobs[i];
        HeterogeneousJob job;
        job.id = parse_int(require(j, "id", path), join(path, "id"));
        job.life.start = rational_from_json(require(j, "release", path), join(path, "release"));
        job.life.end = rational_from_json(require(j, "deadline", path), join(path, "deadline"));
        if (!(job.life.start < job.life.end)) throw ParseError(join(path, "deadline"), "release must precede deadline");
        auto known = [&](const std::string& name) {
            for (const auto& p : inst.processors)
                if (p.id == name) return true;
            return false;
        };
        if (j.contains("work_per_processor")) {
            const Json& wp = j["work_per_processor"];
            if (!wp.is_object()) throw ParseError(join(path, "work_per_processor"), "expected an object");
            for (const auto& [name, value] : wp.items()) {
                const std::string wpath = join(path, "work_per_processor." + name);
                if (!known(name)) throw ParseError(wpath, "unknown processor");
                const Rational w = rational_from_json(value, wpath);
                if (!(w > 0)) throw ParseError(wpath, "work must be positive");
                job.work[name] = w;
            }
        } else {
            const Rational w = rational_from_json(require(j, "work", path), join(path, "work"));
            if (!(w > 0)) throw ParseError(join(path, "work"), "work must be positive");
            for (const auto& p : inst.processors) job.work[p.id] = w;
        }
        if (j.contains("life_per_processor")) {
            const Json& lp = j["life_per_processor"];
            if (!lp.is_object()) throw ParseError(join(path, "life_per_processor"), "expected an object");
            for (const auto& [name, value] : lp.items()) {
                const std::string lpath = join(path, "life_per_processor." + name);
                if (!known(name)) throw ParseError(lpath, "unknown processor");
                job.life_per_processor[name] = parse_interval(value, lpath);
            }
        }
        for (const auto& other : inst.jobs)
            if (other.id == job.id) throw ParseError(join(path, "id"), "duplicate job id");
        inst.jobs.push_back(std::move(job));
    }
    try {
        inst.validate();
    } catch (const std::domain_error& e) {
        throw ParseError("", e.what());
    }
    return inst;
}

}  // namespace

Json rational_to_json(const Rational& value) {
    if (value.is_integer()) return value.num();
    return value.str();
}

Rational rational_from_json(const Json& value, const std::string& path) {
    try {
        if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
        if (value.is_number()) return Rational::from_double(value.get<double>());
        if (value.is_string()) return Rational::parse(value.get<std::string>());
    } catch (const std::exception& e) {
        throw ParseError(path, e.what());
    }
    throw ParseError(path, "expected a number or a \"p/q\" string");
}

Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("", std::string("invalid JSON: ") + e.what());
    }
}

AnyInstance parse_instance(std::string_view text) {
    const Json doc = parse_json(text);
    if (!doc.is_object()) throw ParseError("", "instance document must be an object");
    if (is_heterogeneous_doc(doc)) return parse_heterogeneous(doc);
    return parse_identical(doc);
}

Instance parse_identical_instance(std::string_view text) {
    AnyInstance any = parse_instance(text);
    if (auto* inst = std::get_if<Instance>(&any)) return *inst;
    throw ParseError("", "expected an identical-processor instance");
}

Json instance_to_json(const Instance& instance) {
    Json doc;
    doc["alpha"] = instance.alpha;
    doc["processors"] = instance.processors;
    Json jobs = Json::array();
    for (const auto& j : instance.jobs) {
        Json job;
        job["id"] = j.id;
        job["release"] = rational_to_json(j.release);
        job["deadline"] = rational_to_json(j.deadline);
        job["work"] = rational_to_json(j.work);
        jobs.push_back(std::move(job));
    }
    doc["jobs"] = std::move(jobs);
    return doc;
}

Json instance_to_json(const HeterogeneousInstance& instance) {
    Json doc;
    doc["alpha"] = instance.alpha;
    Json procs = Json::array();
    for (const auto& p : instance.processors) procs.push_back(Json{{"id", p.id}, {"alpha", p.alpha}});
    doc["processors"] = std::move(procs);
    Json jobs = Json::array();
    for (const auto& j : instance.jobs) {
        Json job;
        job["id"] = j.id;
        job["release"] = rational_to_json(j.life.start);
        job["deadline"] = rational_to_json(j.life.end);
        Json works = Json::object();
        for (const auto& p : instance.processors)
            if (auto it = j.work.find(p.id); it != j.work.end()) works[p.id] = rational_to_json(it->second);
        job["work_per_processor"] = std::move(works);
        if (!j.life_per_processor.empty()) {
            Json lives = Json::object();
            for (const auto& p : instance.processors)
                if (auto it = j.life_per_processor.find(p.id); it != j.life_per_processor.end()) lives[p.id] = interval_to_json(it->second);
            job["life_per_processor"] = std::move(lives);
        }
        jobs.push_back(std::move(job));
    }
    doc["jobs"] = std::move(jobs);
    return doc;
}

Json instance_to_json(const AnyInstance& instance) {
    return std::visit([](const auto& inst) { return instance_to_json(inst); }, instance);
}

std::string serialize_instance(const AnyInstance& instance) { return instance_to_json(instance).dump(2); }

Json schedule_to_json(const Schedule& schedule, std::optional<double> energy) {
    Json doc;
    Json rows = Json::array();
    for (const auto& a : schedule.assignments) {
        Json row;
        row["job"] = a.job;
        row["processor"] = a.processor;
        row["start"] = a.interval.start.to_double();
        row["end"] = a.interval.end.to_double();
        row["start_exact"] = a.interval.start.str();
        row["end_exact"] = a.interval.end.str();
        rows.push_back(std::move(row));
    }
    doc["assignments"] = std::move(rows);
    if (energy) doc["energy"] = *energy;
    return doc;
}

Schedule schedule_from_json(const Json& doc) {
    Schedule s;
    const Json& rows = require(doc, "assignments", "");
    if (!rows.is_array()) throw ParseError("assignments", "expected an array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string path = "assignments[" + std::to_string(i) + "]";
        const Json& r = rows[i];
        Assignment a;
        a.job = parse_int(require(r, "job", path), join(path, "job"));
        if (r.contains("processor")) {
            if (!r["processor"].is_string()) throw ParseError(join(path, "processor"), "expected a string");
            a.processor = r["processor"].get<std::string>();
        }
        a.interval.start = r.contains("start_exact") ? rational_from_json(r["start_exact"], join(path, "start_exact"))
                                                     : rational_from_json(require(r, "start", path), join(path, "start"));
        a.interval.end = r.contains("end_exact") ? rational_from_json(r["end_exact"], join(path, "end_exact"))
                                                 : rational_from_json(require(r, "end", path), join(path, "end"));
        s.assignments.push_back(std::move(a));
    }
    return s;
}

Schedule parse_schedule(std::string_view text) { return schedule_from_json(parse_json(text)); }

}  // namespace speedscale
