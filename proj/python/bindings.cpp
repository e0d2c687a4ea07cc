#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tcdark/config.hpp"
#include "tcdark/darkspace.hpp"
#include "tcdark/experiments.hpp"

namespace py = pybind11;
using namespace tcdark;

namespace {

ExperimentSpec resolve(const std::string& name, const std::map<std::string, std::string>& overrides) {
  ExperimentSpec spec = find_experiment(name);
  for (const auto& [k, v] : overrides) apply_setting(spec, k, v);
  spec.validate();
  return spec;
}

py::dict trajectory_dict(const ExperimentSpec& spec, const TrajectoryRecord& r) {
  py::dict out;
  out["name"] = spec.name;
  out["t"] = py::array_t<double>(static_cast<py::ssize_t>(r.times.size()), r.times.data());
  py::dict cols;
  for (std::size_t i = 0; i < r.names.size(); ++i)
    cols[py::str(r.names[i])] = py::array_t<double>(static_cast<py::ssize_t>(r.columns[i].size()), r.columns[i].data());
  out["columns"] = cols;
  out["final_state"] = r.final_state;
  out["norm_drift"] = r.norm_drift;
  out["steps"] = r.steps;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tavis-Cummings dark-state simulator";

  py::register_exception<NumericalError>(m, "NumericalError");
  py::register_exception<GraphNotEven>(m, "GraphNotEven", PyExc_ValueError);

  m.def("experiments", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : builtin_experiments()) out.emplace_back(s.alias, s.name);
    return out;
  });

  m.def("config", [](const std::string& name, const std::map<std::string, std::string>& overrides) {
    return spec_entries(resolve(name, overrides));
  }, py::arg("name"), py::arg("overrides") = std::map<std::string, std::string>{});

  m.def("run", [](const std::string& name, const std::map<std::string, std::string>& overrides) {
    const auto spec = resolve(name, overrides);
    ExperimentRun run;
    {
      py::gil_scoped_release release;
      run = run_experiment(spec);
    }
    return trajectory_dict(spec, run.record);
  }, py::arg("name"), py::arg("overrides") = std::map<std::string, std::string>{},
     "Run a built-in experiment with key=value overrides; returns t, columns and the final state.");

  m.def("converge", [](const std::string& name, const std::map<std::string, std::string>& overrides) {
    const auto spec = resolve(name, overrides);
    ConvergenceReport rep;
    {
      py::gil_scoped_release release;
      rep = converge_experiment(spec);
    }
    py::dict out;
    out["floor"] = rep.floor;
    out["observables"] = rep.observable_floors;
    return out;
  }, py::arg("name"), py::arg("overrides") = std::map<std::string, std::string>{});

  m.def("spectrum", [](const std::string& name, const std::map<std::string, std::string>& overrides) {
    const auto flow = spectrum_experiment(resolve(name, overrides));
    Eigen::MatrixXd levels(static_cast<Eigen::Index>(flow.times.size()),
                           flow.levels.empty() ? 0 : flow.levels.front().size());
    for (std::size_t i = 0; i < flow.times.size(); ++i) levels.row(static_cast<Eigen::Index>(i)) = flow.levels[i].transpose();
    py::dict out;
    out["t"] = flow.times;
    out["levels"] = levels;
    out["degenerate"] = flow.degenerate;
    return out;
  }, py::arg("name"), py::arg("overrides") = std::map<std::string, std::string>{});

  m.def("basis_labels", [](int cavities, int atoms, bool mobile, int sector) {
    const auto space = HilbertSpace::enumerate(cavities, {atoms, mobile, {}}, sector);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < space->dim(); ++i) out.push_back(space->label(i));
    return out;
  }, py::arg("cavities"), py::arg("atoms"), py::arg("mobile") = false, py::arg("sector") = 1);

  m.def("collective_kernel", [](const std::vector<double>& g, double tol) {
    const auto space = HilbertSpace::enumerate(1, {static_cast<int>(g.size()), false, {}}, std::nullopt, 0);
    const DarkBasis k = nullspace(collective_lowering(space, g), tol);
    return py::make_tuple(k.rank, k.nullity, k.vectors);
  }, py::arg("g"), py::arg("tol") = kDefaultKernelTol, "Rank, nullity and kernel basis of sum_k g_k sigma_k.");

  m.def("dark_dimension", [](int atoms, int sector, const std::vector<double>& g) {
    const auto space = HilbertSpace::enumerate(1, {atoms, false, {}}, sector);
    Eigen::MatrixXd gm = Eigen::Map<const Eigen::RowVectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
    return dark_subspace(space, gm).nullity;
  }, py::arg("atoms"), py::arg("sector"), py::arg("g"));

  m.def("graph_dark_state", [](const std::vector<std::pair<int, int>>& edges) {
    CavityGraph graph{1, edges};
    for (auto [u, v] : edges) graph.vertices = std::max({graph.vertices, u + 1, v + 1});
    const auto space = HilbertSpace::enumerate(graph.vertices, {2, true, {}}, 1);
    return graph_dark_state(graph, *space);
  }, py::arg("edges"));
}
