#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ueassign/baseline.hpp"
#include "ueassign/error.hpp"
#include "ueassign/fixtures.hpp"
#include "ueassign/io.hpp"
#include "ueassign/physarum.hpp"

namespace py = pybind11;
using namespace ueassign;

namespace {

// Python callbacks receive plain lists; the spans in IterationRecord only live
// for the duration of the call.
IterationObserver wrap_observer(const std::optional<py::function>& fn) {
  if (!fn) return {};
  return [fn](const IterationRecord& rec) {
    (*fn)(rec.iteration, rec.principle1_delta,
          std::vector<double>(rec.flows.begin(), rec.flows.end()));
  };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Traffic user-equilibrium assignment";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<DuplicateLinkError>(m, "DuplicateLinkError", error.ptr());
  auto infeasible = py::register_exception<InfeasibleError>(m, "InfeasibleError", error.ptr());
  py::register_exception<DisconnectedError>(m, "DisconnectedError", infeasible.ptr());
  py::register_exception<ConditioningError>(m, "ConditioningError", error.ptr());

  py::class_<Link>(m, "Link")
      .def(py::init([](NodeIndex tail, NodeIndex head, double fft, double cap, double b, double power) {
             return Link{tail, head, fft, cap, b, power};
           }),
           py::arg("tail"), py::arg("head"), py::arg("free_flow_time"), py::arg("capacity"),
           py::arg("b") = kDefaultBprCoefficient, py::arg("power") = kDefaultBprPower)
      .def_readonly("tail", &Link::tail)
      .def_readonly("head", &Link::head)
      .def_readonly("free_flow_time", &Link::free_flow_time)
      .def_readonly("capacity", &Link::capacity)
      .def_readonly("b", &Link::bpr_coefficient)
      .def_readonly("power", &Link::bpr_power)
      .def("__repr__", [](const Link& l) {
        return "Link(" + std::to_string(l.tail) + ", " + std::to_string(l.head) + ")";
      });

  py::class_<Network>(m, "Network")
      .def(py::init<std::size_t, std::vector<Link>>(), py::arg("node_count"), py::arg("links"))
      .def_property_readonly("node_count", &Network::node_count)
      .def_property_readonly("link_count", &Network::link_count)
      .def_property_readonly("links", &Network::links)
      .def("find_link", &Network::find_link)
      .def("free_flow_times", &Network::free_flow_times);

  py::class_<DemandTable>(m, "DemandTable")
      .def(py::init([](const std::vector<std::tuple<NodeIndex, NodeIndex, double>>& rows) {
             std::vector<OdDemand> entries;
             for (const auto& [r, s, q] : rows) entries.push_back({r, s, q});
             return DemandTable(std::move(entries));
           }),
           py::arg("entries"))
      .def_property_readonly("entries",
                             [](const DemandTable& d) {
                               std::vector<std::tuple<NodeIndex, NodeIndex, double>> rows;
                               for (const auto& e : d.entries())
                                 rows.emplace_back(e.origin, e.destination, e.demand);
                               return rows;
                             })
      .def_property_readonly("origins", &DemandTable::origins)
      .def_property_readonly("total_demand", &DemandTable::total_demand)
      .def("__len__", &DemandTable::size);

  py::class_<Problem>(m, "Problem")
      .def(py::init<Network, DemandTable>(), py::arg("network"), py::arg("demands"))
      .def_readonly("network", &Problem::network)
      .def_readonly("demands", &Problem::demands);

  py::class_<SolutionReport>(m, "SolutionReport")
      .def_readonly("algorithm", &SolutionReport::algorithm)
      .def_readonly("flows", &SolutionReport::flows)
      .def_readonly("travel_times", &SolutionReport::travel_times)
      .def_readonly("lengths", &SolutionReport::lengths)
      .def_readonly("iterations", &SolutionReport::iterations)
      .def_readonly("converged", &SolutionReport::converged)
      .def_readonly("epsilon_history", &SolutionReport::epsilon_history)
      .def_readonly("beckmann", &SolutionReport::beckmann)
      .def_readonly("rgap", &SolutionReport::rgap);

  py::enum_<physarum::Mode>(m, "Mode")
      .value("modified", physarum::Mode::modified)
      .value("aggregate", physarum::Mode::aggregate)
      .value("shortest_path", physarum::Mode::shortest_path);

  py::class_<physarum::SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("epsilon0", &physarum::SolverConfig::epsilon0)
      .def_readwrite("max_iterations", &physarum::SolverConfig::max_iterations)
      .def_readwrite("rng_seed", &physarum::SolverConfig::rng_seed)
      .def_readwrite("d_init_min", &physarum::SolverConfig::d_init_min)
      .def_readwrite("d_init_max", &physarum::SolverConfig::d_init_max)
      .def_readwrite("mode", &physarum::SolverConfig::mode)
      .def_readwrite("stall_window", &physarum::SolverConfig::stall_window);

  py::class_<baseline::FrankWolfeConfig>(m, "FrankWolfeConfig")
      .def(py::init<>())
      .def_readwrite("rgap_target", &baseline::FrankWolfeConfig::rgap_target)
      .def_readwrite("max_iterations", &baseline::FrankWolfeConfig::max_iterations)
      .def_readwrite("line_search_tolerance", &baseline::FrankWolfeConfig::line_search_tolerance)
      .def_readwrite("max_bisections", &baseline::FrankWolfeConfig::max_bisections);

  using Flows = const std::vector<double>&;
  m.def("travel_times", [](const Network& n, Flows x) { return travel_times(n, x); },
        py::arg("network"), py::arg("flows"));
  m.def("beckmann_objective", [](const Network& n, Flows x) { return beckmann_objective(n, x); },
        py::arg("network"), py::arg("flows"));
  m.def("beckmann_gradient", [](const Network& n, Flows x) { return beckmann_gradient(n, x); },
        py::arg("network"), py::arg("flows"));

  m.def(
      "solve_ue",
      [](const Problem& p, const physarum::SolverConfig& cfg, std::optional<py::function> cb) {
        return physarum::solve(p, cfg, wrap_observer(cb));
      },
      py::arg("problem"), py::arg("config") = physarum::SolverConfig{},
      py::arg("observer") = py::none());
  m.def(
      "frank_wolfe",
      [](const Problem& p, const baseline::FrankWolfeConfig& cfg, std::optional<py::function> cb) {
        return baseline::frank_wolfe(p, cfg, wrap_observer(cb));
      },
      py::arg("problem"), py::arg("config") = baseline::FrankWolfeConfig{},
      py::arg("observer") = py::none());
  m.def(
      "shortest_path_flux",
      [](const Network& net, const std::vector<double>& lengths, NodeIndex source, NodeIndex sink,
         physarum::SolverConfig cfg) {
        cfg.mode = physarum::Mode::shortest_path;
        const auto r = physarum::shortest_path_flux(net, lengths, source, sink, cfg);
        return py::make_tuple(r.flux, r.iterations, r.converged);
      },
      py::arg("network"), py::arg("lengths"), py::arg("source"), py::arg("sink"),
      py::arg("config") = physarum::SolverConfig{});

  m.def("relative_gap", [](const Problem& p, Flows x) { return baseline::relative_gap(p, x); },
        py::arg("problem"), py::arg("flows"));
  m.def(
      "error_metrics",
      [](const std::vector<double>& flows, const std::vector<double>& reference) {
        const auto e = baseline::error_metrics(flows, reference);
        return py::make_tuple(e.epsilon_sum, e.epsilon_rel_max);
      },
      py::arg("flows"), py::arg("reference"));

  m.def(
      "load_problem",
      [](const std::filesystem::path& links, const std::filesystem::path& trips) {
        return static_cast<Problem>(io::load_problem(links, trips));
      },
      py::arg("links"), py::arg("trips"));
  m.def("crossed_pairs", [] { return static_cast<Problem>(fixtures::crossed_pairs()); });
  m.def("sioux_falls", [] { return static_cast<Problem>(fixtures::sioux_falls()); });
  m.def("sioux_falls_reference_flows", &fixtures::sioux_falls_reference_flows);
}
