// Python bindings. Instances and results cross the boundary as JSON text; the
// speedscale package converts them to and from dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "speedscale/errors.hpp"
#include "speedscale/hardness.hpp"
#include "speedscale/json_io.hpp"
#include "speedscale/lp1.hpp"
#include "speedscale/multiproc.hpp"
#include "speedscale/oracle.hpp"
#include "speedscale/rounding.hpp"

namespace py = pybind11;
using namespace speedscale;

namespace {

LandmarkGrid grid_for(const Instance& inst, double epsilon, std::int64_t cells) {
    return cells > 0 ? build_uniform_grid(inst, cells) : build_grid(inst, epsilon);
}

std::string yds_json(const std::string& instance) {
    const Instance inst = parse_identical_instance(instance);
    const YdsResult r = yds_preemptive(inst);
    Json out;
    out["energy"] = r.energy;
    Json speeds = Json::array();
    for (const auto& s : r.profile.level_speeds) speeds.push_back(rational_to_json(s));
    out["level_speeds"] = speeds;
    return out.dump();
}

std::string lp1_json(const std::string& instance, double epsilon, bool non_preemption, std::int64_t cells) {
    const Instance inst = parse_identical_instance(instance);
    const Lp1Result r = solve_lp1(build_lp1(inst, grid_for(inst, epsilon, cells), non_preemption));
    Json out;
    out["value"] = r.value;
    Json support = Json::array();
    for (const auto& [key, value] : r.solution.values)
        support.push_back({{"job", key.first}, {"interval", {rational_to_json(key.second.start), rational_to_json(key.second.end)}}, {"value", value}});
    out["support"] = support;
    return out.dump();
}

std::string export_lp1_json(const std::string& instance, std::int64_t cells, bool non_preemption) {
    const Instance inst = parse_identical_instance(instance);
    Lp1BuildOptions o;
    o.materialize = true;
    const Lp1Model m = build_lp1(inst, build_uniform_grid(inst, cells), non_preemption, o);
    const LinearProgram& lp = *m.lp;
    Json out;
    out["cost_scale"] = m.cost_scale;
    out["objective"] = lp.objective;
    out["lower"] = lp.lower;
    Json rows = Json::array();
    for (const auto& row : lp.rows) {
        Json terms = Json::array();
        for (const auto& t : row.terms) terms.push_back({t.var, t.coeff});
        const char* rel = row.relation == Relation::kLessEqual ? "<=" : row.relation == Relation::kGreaterEqual ? ">=" : "==";
        rows.push_back({{"terms", terms}, {"relation", rel}, {"rhs", row.rhs}});
    }
    out["rows"] = rows;
    return out.dump();
}

std::string solve_json(const std::string& instance, double epsilon, const std::string& strategy) {
    const Instance inst = parse_identical_instance(instance);
    Json out;
    if (inst.processors == 1) {
        const Lp1Result lp = solve_lp1(build_lp1(inst, build_grid(inst, epsilon), true));
        const RoundingReport r = round_solution(lp.solution, inst);
        out["lp_value"] = lp.value;
        out["energy"] = r.energy_final;
        out["stages"] = {{"energy_x", r.energy_x}, {"energy_y", r.energy_y}, {"energy_z", r.energy_z},
                         {"matching_weight", r.matching_weight}, {"energy_final", r.energy_final}};
        out["schedule"] = schedule_to_json(r.placed.schedule);
    } else {
        const MultiprocResult r = schedule_multiproc(inst, parse_window_strategy(strategy));
        out["energy"] = r.energy;
        out["window_energy"] = r.window_energy;
        out["repacked_windows"] = r.repacked_windows;
        out["schedule"] = schedule_to_json(r.schedule);
    }
    return out.dump();
}

std::string brute_json(const std::string& instance, double epsilon, std::int64_t cells, std::uint64_t cap) {
    const AnyInstance any = parse_instance(instance);
    BruteForceResult r;
    if (const auto* inst = std::get_if<Instance>(&any)) {
        r = brute_force_nonpreemptive(*inst, grid_for(*inst, epsilon, cells), {cap});
    } else {
        const auto& het = std::get<HeterogeneousInstance>(any);
        const Interval span = het.span();
        r = brute_force_nonpreemptive(het, build_grid_from_endpoints({span.start, span.end}, cells > 0 ? cells : 1), {cap});
    }
    Json out;
    out["energy"] = r.energy;
    out["schedule"] = schedule_to_json(r.schedule);
    return out.dump();
}

std::string validate_json(const std::string& instance, const std::string& schedule) {
    const AnyInstance any = parse_instance(instance);
    const Schedule s = parse_schedule(schedule);
    const auto violations = std::visit([&](const auto& inst) { return validate_schedule(s, inst); }, any);
    Json out = Json::array();
    for (const auto& v : violations) out.push_back(v.message);
    return out.dump();
}

std::string random_json(int n, int m, double alpha, std::uint64_t seed) {
    RandomInstanceOptions o;
    o.jobs = n;
    o.processors = m;
    o.alpha = alpha;
    o.seed = seed;
    return serialize_instance(generate_random(o));
}

std::string reduce_json(const std::string& tdm, double alpha) { return serialize_instance(reduce_three_dm(parse_three_dm(tdm), alpha).instance); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Non-preemptive speed-scaling schedulers and oracles";
    m.attr("__version__") = SPEEDSCALE_VERSION;

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
    py::register_exception<SizeLimitError>(m, "SizeLimitError", PyExc_RuntimeError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

    m.def("yds", &yds_json, py::arg("instance"));
    m.def("solve_lp1", &lp1_json, py::arg("instance"), py::arg("epsilon") = 0.5, py::arg("non_preemption") = true, py::arg("cells") = 0);
    m.def("export_lp1", &export_lp1_json, py::arg("instance"), py::arg("cells"), py::arg("non_preemption") = true);
    m.def("solve", &solve_json, py::arg("instance"), py::arg("epsilon") = 0.5, py::arg("strategy") = "lp");
    m.def("brute_force", &brute_json, py::arg("instance"), py::arg("epsilon") = 0.5, py::arg("cells") = 0,
          py::arg("cap") = BruteForceOptions{}.cap);
    m.def("validate", &validate_json, py::arg("instance"), py::arg("schedule"));
    m.def("generate_random", &random_json, py::arg("n"), py::arg("m") = 1, py::arg("alpha") = 2.0, py::arg("seed") = 1);
    m.def("generate_gap_family", [](int n, double alpha) { return serialize_instance(generate_gap_family(n, alpha)); }, py::arg("n"),
          py::arg("alpha") = 2.0);
    m.def("reduce_three_dm", &reduce_json, py::arg("tdm"), py::arg("alpha") = 2.0);
    m.def("generalized_bell", [](double alpha) { return generalized_bell(alpha); }, py::arg("alpha"));
    m.def("gap_beta", &gap_beta, py::arg("alpha"));
}
