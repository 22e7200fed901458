#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

#include "droneplan/errors.hpp"
#include "droneplan/geometry.hpp"
#include "droneplan/homotopy.hpp"
#include "droneplan/oracle.hpp"
#include "droneplan/ordering.hpp"
#include "droneplan/scenario.hpp"
#include "droneplan/validate.hpp"

namespace py = pybind11;

namespace {

using Pair = std::pair<double, double>;

droneplan::Point2 to_point(const Pair& p) { return droneplan::Point2{p.first, p.second}; }

droneplan::ClusterLayout to_layout(const std::vector<Pair>& heads) {
    droneplan::ClusterLayout layout;
    layout.heads.reserve(heads.size());
    for (const Pair& h : heads) layout.heads.push_back(to_point(h));
    return layout;
}

droneplan::DronePath to_drone_path(const Pair& start, const Pair& end,
                                   const std::vector<Pair>& vertices) {
    droneplan::DronePath path{to_point(start), to_point(end), {}};
    path.vertices.reserve(vertices.size());
    for (const Pair& v : vertices) path.vertices.push_back(to_point(v));
    return path;
}

py::list points_list(const std::vector<droneplan::Point2>& pts) {
    py::list out;
    for (const droneplan::Point2& p : pts) out.append(py::make_tuple(p.x, p.y));
    return out;
}

py::dict trace_dict(const droneplan::Trace& trace) {
    py::dict d;
    py::list order;
    for (std::size_t idx : trace.order) order.append(idx + 1);
    d["order"] = order;
    d["tour_length"] = trace.tour_length;
    d["initial_length"] = trace.initial_length;
    d["lambda0"] = trace.lambda0;
    d["step"] = trace.step;
    d["merge_threshold"] = trace.merge_threshold;
    d["terminated"] = droneplan::to_string(trace.terminated_reason);
    py::list s, length, energy, lam, residual;
    for (const droneplan::TraceSample& smp : trace.samples) {
        s.append(smp.state.s);
        length.append(smp.length);
        energy.append(smp.energy);
        lam.append(smp.state.lambda);
        residual.append(smp.residual);
    }
    d["s"] = s;
    d["length"] = length;
    d["energy"] = energy;
    d["lambda"] = lam;
    d["residual"] = residual;
    py::list merges;
    for (const droneplan::MergeEvent& ev : trace.merge_events)
        merges.append(py::make_tuple(ev.sample, ev.segment));
    d["merge_events"] = merges;
    const droneplan::DronePath final_path =
        droneplan::state_to_path(trace.samples.back().state, trace.start, trace.end);
    d["vertices"] = points_list(final_path.vertices);
    return d;
}

py::dict plan_py(const std::string& scenario_json, double target) {
    droneplan::Scenario sc = droneplan::parse_scenario_text(scenario_json);
    droneplan::TourOrder order;
    switch (sc.ordering) {
        case droneplan::OrderingMode::exact:
            order = droneplan::exact_order(sc.layout, sc.start, sc.end);
            break;
        case droneplan::OrderingMode::heuristic:
            order = droneplan::heuristic_order(sc.layout, sc.start, sc.end);
            break;
        case droneplan::OrderingMode::as_given:
            order = droneplan::as_given_order(sc.layout, sc.start, sc.end);
            break;
    }
    droneplan::RunOptions options;
    options.target = std::min(target, order.tour_length);
    droneplan::Trace trace = droneplan::run_homotopy(sc, options);
    if (trace.terminated_reason != droneplan::TerminatedReason::target_length_reached)
        throw droneplan::Error("continuation terminated (" +
                               droneplan::to_string(trace.terminated_reason) +
                               ") before reaching the target length");
    py::dict d = trace_dict(trace);
    const droneplan::TraceSample& fin = trace.samples.back();
    d["target_length"] = target;
    d["length_achieved"] = fin.length;
    d["energy_final"] = fin.energy;
    d["lambda_final"] = fin.state.lambda;
    return d;
}

py::dict sweep_py(const std::string& scenario_json) {
    droneplan::Scenario sc = droneplan::parse_scenario_text(scenario_json);
    return trace_dict(droneplan::run_homotopy(sc));
}

py::list validate_py(const std::string& scenario_json) {
    droneplan::Scenario sc = droneplan::parse_scenario_text(scenario_json);
    py::list out;
    for (const droneplan::SuiteResult& r : droneplan::run_validation_suites(sc)) {
        py::dict d;
        d["name"] = r.name;
        d["passed"] = r.passed;
        d["detail"] = r.detail;
        out.append(d);
    }
    return out;
}

double energy_py(const std::vector<Pair>& heads, const Pair& start, const Pair& end,
                 const std::vector<Pair>& vertices, double p) {
    return droneplan::energy(to_drone_path(start, end, vertices), to_layout(heads),
                             droneplan::PowerModel{p});
}

double path_length_py(const Pair& start, const Pair& end, const std::vector<Pair>& vertices) {
    return droneplan::path_length(to_drone_path(start, end, vertices));
}

py::tuple order_py(const std::vector<Pair>& heads, const Pair& start, const Pair& end,
                   bool exact) {
    const droneplan::TourOrder order =
        exact ? droneplan::exact_order(to_layout(heads), to_point(start), to_point(end))
              : droneplan::heuristic_order(to_layout(heads), to_point(start), to_point(end));
    py::list perm;
    for (std::size_t idx : order.perm) perm.append(idx);
    return py::make_tuple(perm, order.tour_length);
}

py::dict closed_form_py(const Pair& head, const Pair& start, double L, double p) {
    const auto [path, lambda] = droneplan::single_head_closed_form(
        to_point(head), to_point(start), L, droneplan::PowerModel{p});
    py::dict d;
    d["vertex"] = py::make_tuple(path.vertices[0].x, path.vertices[0].y);
    d["energy"] = droneplan::energy(path, droneplan::ClusterLayout{{to_point(head)}},
                                    droneplan::PowerModel{p});
    d["lambda"] = lambda;
    return d;
}

py::dict minimize_py(const std::vector<Pair>& ordered_heads, const Pair& start, const Pair& end,
                     double L, double p, std::size_t restarts, std::uint64_t seed) {
    const droneplan::OracleResult res = droneplan::constrained_minimize(
        to_layout(ordered_heads), to_point(start), to_point(end), L, droneplan::PowerModel{p},
        restarts, seed);
    py::dict d;
    d["vertices"] = points_list(res.path.vertices);
    d["energy"] = res.energy;
    d["constraint_violation"] = res.constraint_violation;
    d["restarts_agreeing"] = res.restarts_agreeing;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "locally optimal drone harvesting paths under a path-length budget";
    m.attr("__version__") = "0.1.0";

    py::register_exception<droneplan::ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<droneplan::InfeasibleTargetError>(m, "InfeasibleTargetError",
                                                             PyExc_ValueError);
    py::register_exception<droneplan::RangeError>(m, "RangeError", PyExc_ValueError);

    m.def("plan", &plan_py, py::arg("scenario_json"), py::arg("target"),
          "Plan a harvesting path of the given maximum length; returns the "
          "continuation trace plus the final vertices, length, energy and multiplier.");
    m.def("sweep", &sweep_py, py::arg("scenario_json"),
          "Sweep from the full tour down to the first merge (or the straight-line "
          "floor) and return the whole continuation trace.");
    m.def("validate", &validate_py, py::arg("scenario_json"),
          "Run the validation suites for a scenario; returns one record per suite.");
    m.def("energy", &energy_py, py::arg("heads"), py::arg("start"), py::arg("end"),
          py::arg("vertices"), py::arg("p") = 2.0,
          "Total harvesting energy of a path against its ordered heads.");
    m.def("path_length", &path_length_py, py::arg("start"), py::arg("end"), py::arg("vertices"),
          "Polyline length start -> vertices -> end.");
    m.def("tour_order", &order_py, py::arg("heads"), py::arg("start"), py::arg("end"),
          py::arg("exact") = true,
          "Visit order minimizing the tour length (exact for small head counts, "
          "nearest-neighbour plus 2-opt otherwise); returns (perm, tour_length).");
    m.def("single_head_closed_form", &closed_form_py, py::arg("head"), py::arg("start"),
          py::arg("length"), py::arg("p") = 2.0,
          "Closed-form optimum for one head with coinciding start and end.");
    m.def("constrained_minimize", &minimize_py, py::arg("ordered_heads"), py::arg("start"),
          py::arg("end"), py::arg("length"), py::arg("p") = 2.0, py::arg("restarts") = 16,
          py::arg("seed") = 0,
          "Derivative-free reference minimizer (multistart augmented Lagrangian).");
}
