#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "speedscale/discretize.hpp"
#include "speedscale/errors.hpp"
#include "speedscale/hardness.hpp"
#include "speedscale/instance.hpp"
#include "speedscale/json_io.hpp"
#include "speedscale/lp1.hpp"
#include "speedscale/multiproc.hpp"
#include "speedscale/oracle.hpp"
#include "speedscale/rounding.hpp"

namespace fs = std::filesystem;
using namespace speedscale;

namespace {

/// Bad command-line usage that CLI11 cannot detect on its own.
class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::optional<double> alpha;
    double epsilon = 0.5;
    std::uint64_t seed = 1;
    std::string strategy = "lp";
    bool no_constraint_3 = false;
    std::string out;
    bool timing = false;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& text, const Globals& g) {
    if (g.out.empty() || g.out == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(g.out, std::ios::binary);
    if (!out) throw UsageError("cannot write " + g.out);
    out << text;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string digest(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

AnyInstance load_instance(const std::string& path, const Globals& g) {
    AnyInstance any = parse_instance(read_text(path));
    if (g.alpha) {
        if (auto* inst = std::get_if<Instance>(&any)) {
            inst->alpha = *g.alpha;
            inst->validate();
        } else {
            auto& het = std::get<HeterogeneousInstance>(any);
            het.alpha = *g.alpha;
            for (auto& p : het.processors) p.alpha = *g.alpha;
            het.validate();
        }
    }
    return any;
}

Instance load_identical(const std::string& path, const Globals& g) {
    AnyInstance any = load_instance(path, g);
    if (auto* inst = std::get_if<Instance>(&any)) return *inst;
    throw UsageError(path + ": this command needs an identical-processor instance");
}

Json base_report(const std::string& command, const std::optional<std::string>& instance_digest, const Globals& g) {
    Json r;
    r["command"] = command;
    r["version"] = SPEEDSCALE_VERSION;
    if (instance_digest) r["instance_digest"] = *instance_digest;
    Json params;
    params["epsilon"] = g.epsilon;
    params["seed"] = g.seed;
    params["strategy"] = g.strategy;
    params["constraint_3"] = !g.no_constraint_3;
    r["parameters"] = std::move(params);
    return r;
}

void add_timing(Json& report, const Globals& g, Clock::time_point start) {
    if (g.timing) report["wall_seconds"] = seconds_since(start);
}

LandmarkGrid make_grid(const Instance& inst, const Globals& g, std::int64_t cells) {
    return cells > 0 ? build_uniform_grid(inst, cells) : build_grid(inst, g.epsilon);
}

LandmarkGrid make_grid(const HeterogeneousInstance& inst, const Globals& g, std::int64_t cells) {
    std::vector<Rational> endpoints;
    for (const auto& j : inst.jobs) {
        endpoints.push_back(j.life.start);
        endpoints.push_back(j.life.end);
        for (const auto& [p, life] : j.life_per_processor) {
            endpoints.push_back(life.start);
            endpoints.push_back(life.end);
        }
    }
    if (cells <= 0) cells = landmarks_per_gap(inst.jobs.size(), g.epsilon) + 1;
    return build_grid_from_endpoints(std::move(endpoints), cells);
}

void require_valid(const Schedule& schedule, const ProblemView& view) {
    auto violations = validate_schedule(schedule, view);
    if (!violations.empty()) throw ScheduleError(std::move(violations));
}

Json solution_to_json(const FractionalSolution& x) {
    Json support = Json::array();
    for (const auto& [key, value] : x.values)
        support.push_back(Json{{"job", key.first}, {"interval", Json::array({rational_to_json(key.second.start), rational_to_json(key.second.end)})}, {"value", value}});
    return Json{{"alpha", x.alpha}, {"support", std::move(support)}};
}

FractionalSolution solution_from_json(const Json& doc) {
    FractionalSolution x;
    if (doc.contains("alpha")) x.alpha = doc["alpha"].get<double>();
    if (!doc.contains("support") || !doc["support"].is_array()) throw ParseError("support", "missing array");
    std::size_t k = 0;
    for (const auto& e : doc["support"]) {
        const std::string path = "support[" + std::to_string(k++) + "]";
        if (!e.contains("job") || !e.contains("interval") || !e.contains("value") || !e["interval"].is_array() || e["interval"].size() != 2)
            throw ParseError(path, "expected {job, interval: [a, b], value}");
        x.add(e["job"].get<int>(), Interval{rational_from_json(e["interval"][0], path + ".interval[0]"), rational_from_json(e["interval"][1], path + ".interval[1]")},
              e["value"].get<double>());
    }
    return x;
}

Lp1Method parse_method(const std::string& name) {
    if (name == "auto") return Lp1Method::kAuto;
    if (name == "generation") return Lp1Method::kGeneration;
    if (name == "full") return Lp1Method::kFull;
    throw UsageError("unknown LP method '" + name + "' (expected auto, generation or full)");
}

Json lp_summary(const Lp1Result& lp, const LandmarkGrid& grid, bool with3) {
    return Json{{"value", lp.value},
                {"status", to_string(lp.status)},
                {"method", lp.method},
                {"constraint_3", with3},
                {"grid_points", grid.size()},
                {"columns", lp.columns},
                {"rows", lp.rows},
                {"nonzeros", lp.nonzeros},
                {"rounds", lp.rounds}};
}

Json rounding_report(const RoundingReport& rep, double lp_value, double alpha) {
    Json stages{{"lp_value", lp_value},
                {"energy_x", rep.energy_x},
                {"energy_y", rep.energy_y},
                {"energy_z", rep.energy_z},
                {"matching_weight", rep.matching_weight},
                {"energy_final", rep.energy_final}};
    Json ratios{{"energy_final/lp_value", lp_value > 0 ? rep.energy_final / lp_value : 1.0},
                {"energy_y/energy_x", rep.energy_y / rep.energy_x},
                {"energy_z/energy_y", rep.energy_z / rep.energy_y},
                {"energy_final/matching_weight", rep.energy_final / rep.matching_weight}};
    Json bounds{{"rounding", std::pow(12.0, alpha - 1)},
                {"split", std::pow(2.0, alpha - 1)},
                {"compress", std::pow(2.0, alpha - 1)},
                {"placement", std::pow(3.0, alpha - 1)}};
    Rational min_slack;
    bool first = true;
    for (const auto& p : rep.placed.packing) {
        if (first || p.slack() < min_slack) min_slack = p.slack();
        first = false;
    }
    Json r{{"stages", std::move(stages)}, {"ratios", std::move(ratios)}, {"bounds", std::move(bounds)}};
    r["independent_set"] = rep.independent_set.jobs;
    r["subzones_used"] = rep.placed.packing.size();
    r["min_subzone_slack"] = rational_to_json(min_slack);
    return r;
}

struct SingleRun {
    Lp1Result lp;
    LandmarkGrid grid;
    RoundingReport rounding;
};

SingleRun run_single(const Instance& inst, const Globals& g, std::int64_t cells, Lp1Method method) {
    SingleRun run;
    run.grid = make_grid(inst, g, cells);
    const Lp1Model model = build_lp1(inst, run.grid, !g.no_constraint_3);
    Lp1SolveOptions opts;
    opts.method = method;
    run.lp = solve_lp1(model, opts);
    RoundingOptions ropts;
    ropts.check_constraints = !g.no_constraint_3;
    run.rounding = round_solution(run.lp.solution, inst, ropts);
    return run;
}

/// max(sum_j w^a / |L_j|^(a-1), YDS(single processor) / m^(a-1)).
double multiproc_lower_bound(const Instance& inst) {
    double alone = 0.0;
    for (const auto& j : inst.jobs) alone += energy_of_job(j.work, j.life().length(), inst.alpha);
    Instance pooled = inst;
    pooled.processors = 1;
    const double yds = yds_preemptive(pooled).energy / std::pow(static_cast<double>(inst.processors), inst.alpha - 1);
    return std::max(alone, yds);
}

Json multiproc_report(const MultiprocResult& res, const Instance& inst, double epsilon) {
    const double lb = multiproc_lower_bound(inst);
    Json stages{{"lower_bound", lb}, {"window_yds_energy", res.window_energy}, {"energy_final", res.energy}};
    Json ratios{{"energy_final/lower_bound", res.energy / lb}, {"energy_final/window_yds_energy", res.energy / res.window_energy}};
    Json bounds{{"approximation_constant", approximation_constant(inst, epsilon)}};
    Json r{{"stages", std::move(stages)}, {"ratios", std::move(ratios)}, {"bounds", std::move(bounds)}};
    r["windows"] = res.windows.windows.size();
    r["residue_jobs"] = res.partition.residue;
    r["repacked_windows"] = res.repacked_windows;
    r["worst_shrink"] = res.worst_shrink;
    r["fractional_cost"] = res.assignment.fractional_cost;
    r["congestion"] = res.assignment.congestion;
    return r;
}

// ---------------------------------------------------------------- commands

void cmd_solve(const Globals& g, const std::string& path, std::int64_t cells) {
    const auto start = Clock::now();
    const AnyInstance any = load_instance(path, g);
    const Instance* inst = std::get_if<Instance>(&any);
    if (!inst) throw UsageError(path + ": solve needs an identical-processor instance");
    Json report = base_report("solve", digest(serialize_instance(any)), g);
    report["parameters"]["alpha"] = inst->alpha;
    Schedule schedule;
    double energy = 0.0;
    if (inst->processors == 1) {
        const SingleRun run = run_single(*inst, g, cells, Lp1Method::kAuto);
        report["lp"] = lp_summary(run.lp, run.grid, !g.no_constraint_3);
        report.update(rounding_report(run.rounding, run.lp.value, inst->alpha));
        schedule = run.rounding.placed.schedule;
        energy = run.rounding.energy_final;
    } else {
        const MultiprocResult res = schedule_multiproc(*inst, parse_window_strategy(g.strategy));
        report.update(multiproc_report(res, *inst, g.epsilon));
        schedule = res.schedule;
        energy = res.energy;
    }
    schedule.sort();
    require_valid(schedule, ProblemView(*inst));
    add_timing(report, g, start);
    write_output(dump(Json{{"report", std::move(report)}, {"schedule", schedule_to_json(schedule, energy)}}), g);
}

void cmd_lp_solve(const Globals& g, const std::string& path, std::int64_t cells, const std::string& method, bool with_solution) {
    const auto start = Clock::now();
    const Instance inst = load_identical(path, g);
    const LandmarkGrid grid = make_grid(inst, g, cells);
    Lp1SolveOptions opts;
    opts.method = parse_method(method);
    const Lp1Result lp = solve_lp1(build_lp1(inst, grid, !g.no_constraint_3), opts);
    Json report = base_report("lp solve", digest(serialize_instance(AnyInstance(inst))), g);
    report["parameters"]["alpha"] = inst.alpha;
    report["lp"] = lp_summary(lp, grid, !g.no_constraint_3);
    report["stages"] = Json{{"lp_value", lp.value}, {"energy_x", fractional_energy(lp.solution, inst)}};
    add_timing(report, g, start);
    Json doc{{"report", std::move(report)}};
    if (with_solution) doc["solution"] = solution_to_json(lp.solution);
    write_output(dump(doc), g);
}

void cmd_lp_export(const Globals& g, const std::string& path, std::int64_t cells, std::size_t max_variables) {
    const Instance inst = load_identical(path, g);
    const LandmarkGrid grid = make_grid(inst, g, cells);
    Lp1BuildOptions opts;
    opts.materialize = true;
    opts.max_variables = max_variables;
    const Lp1Model model = build_lp1(inst, grid, !g.no_constraint_3, opts);
    write_output(to_lp_format(*model.lp), g);
}

void cmd_round(const Globals& g, const std::string& path, const std::string& solution_path, std::int64_t cells) {
    const auto start = Clock::now();
    const Instance inst = load_identical(path, g);
    if (inst.processors != 1) throw UsageError("round needs a single-processor instance");
    Json report = base_report("round", digest(serialize_instance(AnyInstance(inst))), g);
    report["parameters"]["alpha"] = inst.alpha;
    RoundingReport rep;
    double lp_value = 0.0;
    if (solution_path.empty()) {
        const SingleRun run = run_single(inst, g, cells, Lp1Method::kAuto);
        report["lp"] = lp_summary(run.lp, run.grid, !g.no_constraint_3);
        rep = run.rounding;
        lp_value = run.lp.value;
    } else {
        Json doc = parse_json(read_text(solution_path));
        FractionalSolution x = solution_from_json(doc.contains("solution") ? doc["solution"] : doc);
        x.alpha = inst.alpha;
        RoundingOptions ropts;
        ropts.check_constraints = !g.no_constraint_3;
        rep = round_solution(x, inst, ropts);
        lp_value = rep.energy_input;
    }
    report.update(rounding_report(rep, lp_value, inst.alpha));
    if (rep.constraints_y)
        report["constraints_y"] = Json{{"max_assignment_deficit", rep.constraints_y->max_assignment_deficit},
                                       {"max_point_load", rep.constraints_y->max_point_load},
                                       {"max_overlap_sum", rep.constraints_y->max_overlap_sum}};
    if (rep.constraints_z)
        report["constraints_z"] = Json{{"max_assignment_deficit", rep.constraints_z->max_assignment_deficit},
                                       {"max_point_load", rep.constraints_z->max_point_load},
                                       {"max_overlap_sum", rep.constraints_z->max_overlap_sum}};
    Json packing = Json::array();
    for (const auto& p : rep.placed.packing)
        packing.push_back(Json{{"subzone", to_string(p.subzone)},
                               {"size", rational_to_json(p.size)},
                               {"matched_length", rational_to_json(p.matched_length)},
                               {"fractional_length", p.fractional_length},
                               {"placed", rational_to_json(p.placed)},
                               {"slack", rational_to_json(p.slack())}});
    report["packing"] = std::move(packing);
    Schedule schedule = rep.placed.schedule;
    schedule.sort();
    require_valid(schedule, ProblemView(inst));
    add_timing(report, g, start);
    write_output(dump(Json{{"report", std::move(report)}, {"schedule", schedule_to_json(schedule, rep.energy_final)}}), g);
}

void cmd_oracle_yds(const Globals& g, const std::string& path) {
    const auto start = Clock::now();
    const Instance inst = load_identical(path, g);
    if (inst.processors != 1) throw UsageError("oracle yds needs a single-processor instance");
    const YdsResult yds = yds_preemptive(inst);
    Json report = base_report("oracle yds", digest(serialize_instance(AnyInstance(inst))), g);
    report["parameters"]["alpha"] = inst.alpha;
    report["stages"] = Json{{"yds_energy", yds.energy}};
    Json levels = Json::array();
    for (const auto& s : yds.profile.level_speeds) levels.push_back(rational_to_json(s));
    report["level_speeds"] = std::move(levels);
    add_timing(report, g, start);
    Json segments = Json::array();
    for (const auto& s : yds.profile.segments)
        segments.push_back(Json{{"start", rational_to_json(s.interval.start)}, {"end", rational_to_json(s.interval.end)}, {"speed", rational_to_json(s.speed)}});
    Json pieces = Json::array();
    for (const auto& p : yds.profile.allocation)
        pieces.push_back(Json{{"job", p.job}, {"start", rational_to_json(p.interval.start)}, {"end", rational_to_json(p.interval.end)}, {"work", rational_to_json(p.work)}});
    write_output(dump(Json{{"report", std::move(report)}, {"profile", Json{{"segments", std::move(segments)}, {"allocation", std::move(pieces)}}}}), g);
}

void cmd_oracle_brute(const Globals& g, const std::string& path, std::int64_t cells, std::uint64_t cap) {
    const auto start = Clock::now();
    const AnyInstance any = load_instance(path, g);
    BruteForceOptions opts;
    opts.cap = cap;
    Json report = base_report("oracle brute", digest(serialize_instance(any)), g);
    BruteForceResult res;
    std::size_t points = 0;
    std::visit(
        [&](const auto& inst) {
            const LandmarkGrid grid = make_grid(inst, g, cells);
            points = grid.size();
            report["parameters"]["alpha"] = inst.alpha;
            res = brute_force_nonpreemptive(inst, grid, opts);
            res.schedule.sort();
            require_valid(res.schedule, ProblemView(inst));
        },
        any);
    report["grid_points"] = points;
    report["transitions"] = res.transitions;
    report["stages"] = Json{{"brute_energy", res.energy}};
    add_timing(report, g, start);
    write_output(dump(Json{{"report", std::move(report)}, {"schedule", schedule_to_json(res.schedule, res.energy)}}), g);
}

void cmd_gap_experiment(const Globals& g, const std::vector<int>& ns, std::int64_t cells, std::uint64_t cap, bool skip_with3) {
    const double alpha = g.alpha.value_or(2.0);
    std::ostringstream csv;
    csv << "n,alpha,grid_points,lp_no3,lp_with3,brute,brute/lp_no3,brute/lp_with3,status";
    if (g.timing) csv << ",seconds";
    csv << "\n";
    for (int n : ns) {
        const auto start = Clock::now();
        if (n < 1) throw UsageError("n must be positive");
        const Instance inst = generate_gap_family(n, alpha);
        const LandmarkGrid grid = make_grid(inst, g, cells);
        std::string status = "ok";
        std::optional<double> no3, with3, brute;
        try {
            no3 = solve_lp1(build_lp1(inst, grid, false)).value;
            if (!skip_with3) with3 = solve_lp1(build_lp1(inst, grid, true)).value;
            BruteForceOptions opts;
            opts.cap = cap;
            brute = brute_force_nonpreemptive(inst, grid, opts).energy;
        } catch (const SizeLimitError& e) {
            status = std::string("skipped: ") + e.what();
        } catch (const InfeasibleError& e) {
            status = std::string("infeasible: ") + e.what();
        }
        auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
        auto ratio = [&](const std::optional<double>& den) { return brute && den ? format_double(*brute / *den) : std::string(); };
        for (char& c : status)
            if (c == ',' || c == '\n') c = ';';
        csv << n << "," << format_double(alpha) << "," << grid.size() << "," << cell(no3) << "," << cell(with3) << "," << cell(brute) << ","
            << ratio(no3) << "," << ratio(with3) << "," << status;
        if (g.timing) csv << "," << format_double(seconds_since(start));
        csv << "\n";
    }
    write_output(csv.str(), g);
}

void cmd_reduce(const Globals& g, const std::string& path) {
    const ThreeDMInstance tdm = parse_three_dm(read_text(path));
    const ReductionArtifacts art = reduce_three_dm(tdm, g.alpha.value_or(2.0));
    write_output(dump(instance_to_json(art.instance)), g);
}

void cmd_check_gap(const Globals& g, const std::string& tdm_path, const std::string& schedule_path, std::int64_t cells, std::uint64_t cap,
                   std::optional<double> opt_reduced) {
    const auto start = Clock::now();
    const ThreeDMInstance tdm = parse_three_dm(read_text(tdm_path));
    const ReductionArtifacts art = reduce_three_dm(tdm, g.alpha.value_or(2.0));
    Json sdoc = parse_json(read_text(schedule_path));
    const Schedule schedule = schedule_from_json(sdoc.contains("schedule") ? sdoc["schedule"] : sdoc);
    require_valid(schedule, ProblemView(art.instance));
    const int opt_source = max_three_dm(tdm);
    if (!opt_reduced) {
        BruteForceOptions opts;
        opts.cap = cap;
        const LandmarkGrid grid = build_grid_from_endpoints({Rational(0), Rational(3)}, cells);
        opt_reduced = brute_force_nonpreemptive(art.instance, grid, opts).energy;
    }
    const GapReport gap = verify_gap_inequality(art, schedule, opt_source, *opt_reduced);
    Json report = base_report("check-gap", digest(serialize_instance(AnyInstance(art.instance))), g);
    report["parameters"]["alpha"] = art.instance.alpha;
    report["q"] = tdm.q;
    report["stages"] = Json{{"schedule_energy", gap.energy}, {"opt_reduced", *opt_reduced}};
    report["opt_source"] = opt_source;
    report["beta"] = gap_beta(art.instance.alpha);
    report["matching_size"] = gap.matching_size;
    report["machines_with_elements"] = gap.machines_with_elements;
    report["lhs"] = gap.lhs;
    report["rhs"] = gap.rhs;
    report["gap_holds"] = gap.gap_holds;
    report["opt_bound_holds"] = gap.opt_bound_holds;
    add_timing(report, g, start);
    write_output(dump(Json{{"report", std::move(report)}}), g);
}

std::vector<fs::path> corpus_files(const std::string& dir) {
    if (!fs::is_directory(dir)) throw ParseError(dir, "not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

void cmd_bench(const Globals& g, const std::string& dir, const std::vector<std::string>& strategies, std::int64_t cells) {
    std::vector<WindowStrategy> parsed;
    for (const auto& s : strategies) parsed.push_back(parse_window_strategy(s));
    std::ostringstream csv;
    csv << "file,processors,jobs,alpha,strategy,energy,lower_bound,energy/lower_bound,bound,status";
    if (g.timing) csv << ",seconds";
    csv << "\n";
    for (const auto& file : corpus_files(dir)) {
        std::vector<std::string> labels;
        std::optional<Instance> inst;
        std::string load_error;
        try {
            inst = load_identical(file.string(), g);
        } catch (const std::exception& e) {
            load_error = e.what();
        }
        if (!inst) {
            for (char& c : load_error)
                if (c == ',' || c == '\n') c = ';';
            csv << file.filename().string() << ",,,,,,,,,error: " << load_error;
            if (g.timing) csv << ",";
            csv << "\n";
            continue;
        }
        if (inst->processors == 1)
            labels.push_back("rounding");
        else
            for (auto s : parsed) labels.push_back(to_string(s));
        for (std::size_t k = 0; k < labels.size(); ++k) {
            const auto start = Clock::now();
            std::string energy, lower, ratio, bound, status = "ok";
            try {
                double e = 0.0, lb = 0.0;
                if (inst->processors == 1) {
                    const SingleRun run = run_single(*inst, g, cells, Lp1Method::kAuto);
                    require_valid(run.rounding.placed.schedule, ProblemView(*inst));
                    e = run.rounding.energy_final;
                    lb = yds_preemptive(*inst).energy;
                } else {
                    const MultiprocResult res = schedule_multiproc(*inst, parsed[k]);
                    require_valid(res.schedule, ProblemView(*inst));
                    e = res.energy;
                    lb = multiproc_lower_bound(*inst);
                    bound = format_double(approximation_constant(*inst, g.epsilon));
                }
                energy = format_double(e);
                lower = format_double(lb);
                ratio = format_double(e / lb);
            } catch (const std::exception& ex) {
                status = std::string("error: ") + ex.what();
                for (char& c : status)
                    if (c == ',' || c == '\n') c = ';';
            }
            csv << file.filename().string() << "," << inst->processors << "," << inst->jobs.size() << "," << format_double(inst->alpha) << ","
                << labels[k] << "," << energy << "," << lower << "," << ratio << "," << bound << "," << status;
            if (g.timing) csv << "," << format_double(seconds_since(start));
            csv << "\n";
        }
    }
    write_output(csv.str(), g);
}

struct GenOptions {
    int jobs = 4;
    int processors = 1;
    std::string work_min = "1";
    std::string work_max = "4";
    int horizon = 6;
};

RandomInstanceOptions random_options(const Globals& g, const GenOptions& o, double alpha, std::uint64_t seed) {
    RandomInstanceOptions r;
    r.jobs = o.jobs;
    r.processors = o.processors;
    r.alpha = alpha;
    r.seed = seed;
    r.work_min = Rational::parse(o.work_min);
    r.work_max = Rational::parse(o.work_max);
    r.horizon = o.horizon;
    (void)g;
    return r;
}

void cmd_gen_random(const Globals& g, const GenOptions& o) {
    write_output(dump(instance_to_json(generate_random(random_options(g, o, g.alpha.value_or(2.0), g.seed)))), g);
}

void cmd_gen_gap(const Globals& g, int n) {
    if (n < 1) throw UsageError("n must be positive");
    write_output(dump(instance_to_json(generate_gap_family(n, g.alpha.value_or(2.0)))), g);
}

void cmd_gen_planted(const Globals& g, int q, int distractors) {
    write_output(dump(three_dm_to_json(planted_three_dm(q, distractors, g.seed))), g);
}

/// Instance i (1-based) has 1 + (i-1) mod jobs jobs, seed `seed + i` and
/// alpha 2 + (i mod 2) unless --alpha is given.
void cmd_gen_corpus(const Globals& g, const GenOptions& o, const std::string& dir, int count) {
    if (count < 0) throw UsageError("count must be non-negative");
    fs::create_directories(dir);
    for (int i = 1; i <= count; ++i) {
        GenOptions oi = o;
        oi.jobs = 1 + (i - 1) % o.jobs;
        const double alpha = g.alpha.value_or(2.0 + (i % 2));
        const Instance inst = generate_random(random_options(g, oi, alpha, g.seed + static_cast<std::uint64_t>(i)));
        char name[32];
        std::snprintf(name, sizeof name, "inst_%04d.json", i);
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out) throw UsageError("cannot write into " + dir);
        out << dump(instance_to_json(inst));
    }
    if (!g.out.empty()) write_output(std::to_string(count) + "\n", g);
}

void cmd_discretize(const Globals& g, const std::string& path, std::int64_t cells, bool dump_points) {
    const Instance inst = load_identical(path, g);
    const LandmarkGrid grid = make_grid(inst, g, cells);
    Json report = base_report("discretize", digest(serialize_instance(AnyInstance(inst))), g);
    report["grid_points"] = grid.size();
    report["inserted_per_gap"] = grid.inserted_per_gap;
    std::size_t endpoints = 0;
    for (bool b : grid.is_endpoint) endpoints += b ? 1 : 0;
    report["endpoints"] = endpoints;
    Json doc{{"report", std::move(report)}};
    if (dump_points) {
        Json pts = Json::array();
        for (const auto& p : grid.points) pts.push_back(rational_to_json(p));
        doc["points"] = std::move(pts);
    }
    write_output(dump(doc), g);
}

int run(int argc, char** argv) {
    CLI::App app{"Non-preemptive speed-scaling schedulers, relaxations and exact oracles"};
    app.set_version_flag("--version", std::string(SPEEDSCALE_VERSION));
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--alpha", g.alpha, "Override the power exponent (alpha > 1)");
    app.add_option("--epsilon", g.epsilon, "Discretization accuracy")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--strategy", g.strategy, "Window assignment strategy: lp or greedy")->check(CLI::IsMember({"lp", "greedy"}));
    app.add_flag("--no-constraint-3", g.no_constraint_3, "Drop the non-preemption rows from the relaxation");
    app.add_option("--out,-o", g.out, "Write output to this file instead of stdout");
    app.add_flag("--timing", g.timing, "Add wall-clock times to reports");

    std::string instance_path, solution_path, method = "auto", tdm_path, schedule_path, corpus_dir, out_dir;
    std::int64_t cells = 0, check_cells = 3;
    std::uint64_t cap = 10'000'000;
    std::size_t max_variables = 20000;
    bool with_solution = false, skip_with3 = false, dump_points = false;
    std::vector<int> ns{2, 4, 8};
    std::vector<std::string> strategies{"lp", "greedy"};
    std::optional<double> opt_reduced;
    GenOptions gen;
    int gap_n = 4, q = 1, distractors = 2, count = 10;

    auto add_instance = [&](CLI::App* c) { c->add_option("-i,--instance", instance_path, "Instance JSON")->required(); };
    auto add_cells = [&](CLI::App* c) {
        c->add_option("--cells", cells, "Cut each endpoint gap into this many equal cells instead of the epsilon grid");
    };

    auto* solve = app.add_subcommand("solve", "Schedule an instance (rounding for m = 1, windows for m >= 2)");
    add_instance(solve);
    add_cells(solve);
    solve->callback([&] { cmd_solve(g, instance_path, cells); });

    auto* lp = app.add_subcommand("lp", "Interval-indexed relaxation");
    lp->require_subcommand(1);
    auto* lp_solve = lp->add_subcommand("solve", "Solve the relaxation");
    add_instance(lp_solve);
    add_cells(lp_solve);
    lp_solve->add_option("--method", method, "auto, generation or full");
    lp_solve->add_flag("--solution", with_solution, "Include the fractional solution");
    lp_solve->callback([&] { cmd_lp_solve(g, instance_path, cells, method, with_solution); });
    auto* lp_export = lp->add_subcommand("export", "Write the relaxation in LP file format");
    add_instance(lp_export);
    add_cells(lp_export);
    lp_export->add_option("--max-variables", max_variables, "Refuse larger models");
    lp_export->callback([&] { cmd_lp_export(g, instance_path, cells, max_variables); });

    auto* round = app.add_subcommand("round", "Round a fractional solution (solves the relaxation when none is given)");
    add_instance(round);
    add_cells(round);
    round->add_option("--solution", solution_path, "Fractional solution JSON from `lp solve --solution`");
    round->callback([&] { cmd_round(g, instance_path, solution_path, cells); });

    auto* oracle = app.add_subcommand("oracle", "Exact reference solvers");
    oracle->require_subcommand(1);
    auto* yds = oracle->add_subcommand("yds", "Optimal preemptive single-processor schedule");
    add_instance(yds);
    yds->callback([&] { cmd_oracle_yds(g, instance_path); });
    auto* brute = oracle->add_subcommand("brute", "Optimal grid-aligned non-preemptive schedule");
    add_instance(brute);
    add_cells(brute);
    brute->add_option("--cap", cap, "Transition cap");
    brute->callback([&] { cmd_oracle_brute(g, instance_path, cells, cap); });

    auto* gap = app.add_subcommand("gap-experiment", "Relaxation values and brute force on the gap family (CSV)");
    gap->add_option("--n", ns, "Family sizes")->delimiter(',');
    add_cells(gap);
    gap->add_option("--cap", cap, "Transition cap for brute force");
    gap->add_flag("--skip-with-3", skip_with3, "Do not solve the relaxation with non-preemption rows");
    gap->callback([&] { cmd_gap_experiment(g, ns, cells, cap, skip_with3); });

    auto* reduce = app.add_subcommand("reduce-3dm", "Build the scheduling instance of a 3DM instance");
    reduce->add_option("--tdm", tdm_path, "3DM JSON")->required();
    reduce->callback([&] { cmd_reduce(g, tdm_path); });

    auto* check = app.add_subcommand("check-gap", "Check the gap inequality for a schedule of a reduced instance");
    check->add_option("--tdm", tdm_path, "3DM JSON")->required();
    check->add_option("--schedule", schedule_path, "Schedule JSON (bare or under \"schedule\")")->required();
    check->add_option("--cells", check_cells, "Cells of [0, 3] for the brute-force optimum");
    check->add_option("--cap", cap, "Transition cap for brute force");
    check->add_option("--opt-reduced", opt_reduced, "Known optimum of the reduced instance");
    check->callback([&] { cmd_check_gap(g, tdm_path, schedule_path, check_cells, cap, opt_reduced); });

    auto* bench = app.add_subcommand("bench", "Run every instance of a corpus (CSV)");
    bench->add_option("--corpus", corpus_dir, "Directory of instance JSON files")->required();
    bench->add_option("--strategies", strategies, "Window strategies for m >= 2")->delimiter(',');
    add_cells(bench);
    bench->callback([&] { cmd_bench(g, corpus_dir, strategies, cells); });

    auto* gen_cmd = app.add_subcommand("gen", "Instance generators");
    gen_cmd->require_subcommand(1);
    auto add_random_opts = [&](CLI::App* c) {
        c->add_option("--processors,-m", gen.processors, "Processors");
        c->add_option("--work-min", gen.work_min, "Smallest work");
        c->add_option("--work-max", gen.work_max, "Largest work");
        c->add_option("--horizon", gen.horizon, "Releases and deadlines lie in [0, horizon]");
    };
    auto* gen_random = gen_cmd->add_subcommand("random", "Seeded random instance");
    gen_random->add_option("--n", gen.jobs, "Jobs");
    add_random_opts(gen_random);
    gen_random->callback([&] { cmd_gen_random(g, gen); });
    auto* gen_gap = gen_cmd->add_subcommand("gap-family", "Unit jobs plus one long job");
    gen_gap->add_option("--n", gap_n, "Unit jobs");
    gen_gap->callback([&] { cmd_gen_gap(g, gap_n); });
    auto* gen_planted = gen_cmd->add_subcommand("planted-3dm", "3DM instance with a planted perfect matching");
    gen_planted->add_option("--q", q, "Elements per class");
    gen_planted->add_option("--distractors", distractors, "Extra random triples");
    gen_planted->callback([&] { cmd_gen_planted(g, q, distractors); });
    auto* gen_corpus = gen_cmd->add_subcommand("corpus", "Directory of seeded random instances");
    gen_corpus->add_option("--dir", out_dir, "Output directory")->required();
    gen_corpus->add_option("--count", count, "Instances");
    gen_corpus->add_option("--n-max", gen.jobs, "Instance i has 1 + (i-1) mod n-max jobs");
    add_random_opts(gen_corpus);
    gen_corpus->callback([&] { cmd_gen_corpus(g, gen, out_dir, count); });

    auto* disc = app.add_subcommand("discretize", "Landmark grid of an instance");
    add_instance(disc);
    add_cells(disc);
    disc->add_flag("--dump", dump_points, "List every grid point");
    disc->callback([&] { cmd_discretize(g, instance_path, cells, dump_points); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const SizeLimitError& e) {
        std::cerr << "size limit: " << e.what() << "\n";
        return 2;
    } catch (const ScheduleError& e) {
        std::cerr << "invalid schedule: " << e.what() << "\n";
        return 3;
    } catch (const ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
