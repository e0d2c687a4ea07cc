// tcdark: run, inspect and check Tavis-Cummings dark-state experiments.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tcdark/config.hpp"
#include "tcdark/darkspace.hpp"
#include "tcdark/experiments.hpp"

namespace fs = std::filesystem;
using namespace tcdark;

namespace {

constexpr int kUsage = 1;
constexpr int kNumerical = 2;

struct Selection {
  std::vector<std::string> experiments;
  std::string config_file;
  std::vector<std::string> sets;
  std::string backend;
  double dt = 0.0;
  int stride = 0;
  std::string out = "out";

  void attach(CLI::App* cmd, bool many) {
    if (many)
      cmd->add_option("-e,--experiment", experiments, "Experiment name or alias (repeatable)");
    else
      cmd->add_option("-e,--experiment", experiments, "Experiment name or alias")->expected(1);
    cmd->add_option("-c,--config", config_file, "key = value config file");
    cmd->add_option("-s,--set", sets, "Override key=value (repeatable)");
    cmd->add_option("--backend", backend, "dense_spectral or krylov");
    cmd->add_option("--dt", dt, "Time step");
    cmd->add_option("--stride", stride, "Sample every N steps");
    cmd->add_option("-o,--out", out, "Output directory");
  }

  ExperimentSpec customize(ExperimentSpec spec) const {
    for (const auto& s : sets) {
      const auto [k, v] = parse_assignment(s);
      apply_setting(spec, k, v);
    }
    if (!backend.empty()) apply_setting(spec, "run.backend", backend);
    if (dt > 0.0) spec.run.dt = dt;
    if (stride > 0) spec.run.sample_every = stride;
    spec.validate();
    return spec;
  }

  std::vector<ExperimentSpec> specs() const {
    std::vector<ExperimentSpec> out_specs;
    if (!config_file.empty()) {
      const auto entries = read_config_file(config_file);
      ExperimentSpec base;
      if (!experiments.empty()) base = find_experiment(experiments.front());
      out_specs.push_back(customize(spec_from_entries(entries, base)));
      return out_specs;
    }
    if (experiments.empty()) throw CLI::ValidationError("--experiment", "an experiment or --config is required");
    for (const auto& name : experiments) out_specs.push_back(customize(find_experiment(name)));
    return out_specs;
  }
};

fs::path prepare(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

int cmd_list() {
  for (const auto& s : builtin_experiments())
    std::cout << s.alias << '\t' << s.name << '\t' << to_string(s.kind) << '\t' << s.description << '\n';
  return 0;
}

void emit_spectrum(const ExperimentSpec& spec, const fs::path& dir, const std::string& suffix) {
  const auto flow = spectrum_experiment(spec);
  std::ostringstream csv;
  write_spectrum_csv(csv, flow);
  const auto path = dir / (spec.name + suffix);
  write_file(path, csv.str());
  std::ostringstream manifest;
  write_manifest(manifest, spec, nullptr, nullptr, 0.0);
  write_file(dir / (spec.name + ".manifest.txt"), manifest.str());
  const auto levels = flow.levels.empty() ? 0 : flow.levels.front().size();
  std::cout << spec.name << ": " << levels << " levels at " << flow.times.size() << " times -> " << path.string() << '\n';
}

int cmd_config(const Selection& sel) {
  for (const auto& s : sel.specs()) write_config(std::cout, s);
  return 0;
}

int cmd_run(const Selection& sel, int workers, bool with_floor) {
  const auto specs = sel.specs();
  const auto dir = prepare(sel.out);
  std::vector<ExperimentSpec> trajectories;
  for (const auto& s : specs) {
    if (s.kind == ExperimentKind::spectrum)
      emit_spectrum(s, dir, ".csv");
    else
      trajectories.push_back(s);
  }
  const auto runs = run_experiments(trajectories, workers);
  for (const auto& r : runs) {
    std::optional<ConvergenceReport> conv;
    if (with_floor) conv = converge_experiment(r.spec);
    std::ostringstream csv, manifest;
    write_trajectory_csv(csv, r.record);
    write_manifest(manifest, r.spec, &r.record, conv ? &*conv : nullptr, r.seconds);
    write_file(dir / (r.spec.name + ".csv"), csv.str());
    write_file(dir / (r.spec.name + ".manifest.txt"), manifest.str());
    std::cout << r.spec.name << ": " << r.record.steps << " steps, " << r.record.times.size() << " samples, norm drift "
              << format_number(r.record.norm_drift) << " -> " << (dir / (r.spec.name + ".csv")).string() << '\n';
  }
  return 0;
}

int cmd_spectrum(const Selection& sel) {
  const auto dir = prepare(sel.out);
  for (const auto& s : sel.specs()) emit_spectrum(s, dir, ".spectrum.csv");
  return 0;
}

struct DarkOptions {
  double time = 0.0;
  std::vector<double> couplings;
  double black_delta = 0.0;
  bool collective = false;
  std::string graph;
  double tol = kDefaultKernelTol;
};

void report_kernel(const DarkBasis& basis, const fs::path& path) {
  std::cout << "rank=" << basis.rank << " nullity=" << basis.nullity << '\n';
  std::ostringstream csv;
  write_basis_csv(csv, basis);
  write_file(path, csv.str());
  std::cout << "basis -> " << path.string() << '\n';
}

int cmd_darkspace(const Selection& sel, const DarkOptions& opt) {
  const auto dir = prepare(sel.out);

  if (!opt.graph.empty()) {
    CavityGraph graph;
    ExperimentSpec parse_target;
    apply_setting(parse_target, "model.edges", opt.graph);
    graph.edges = parse_target.edges;
    for (auto [u, v] : graph.edges) graph.vertices = std::max({graph.vertices, u + 1, v + 1});
    const auto space = HilbertSpace::enumerate(graph.vertices, AtomSpec{2, true, {}}, 1);
    const StateVector psi = graph_dark_state(graph, *space);
    DarkBasis one;
    one.space = space;
    one.vectors = psi;
    one.nullity = 1;
    std::cout << "graph even: " << graph.vertices << " cavities, " << graph.edges.size() << " bridges\n";
    std::ostringstream csv;
    write_basis_csv(csv, one);
    write_file(dir / "graph-dark-state.csv", csv.str());
    std::cout << "state -> " << (dir / "graph-dark-state.csv").string() << '\n';
    return 0;
  }

  const auto spec = sel.specs().front();
  const DrivenModel model = build_model(spec);

  if (opt.collective) {
    std::vector<double> g = opt.couplings;
    if (g.empty()) {
      const Eigen::MatrixXd gt = model.couplings(opt.time);
      for (int k = 0; k < spec.atoms; ++k) g.push_back(gt.col(k).maxCoeff());
    }
    if (static_cast<int>(g.size()) != spec.atoms) throw std::invalid_argument("--g needs one coupling per atom");
    const auto atomic = HilbertSpace::enumerate(1, AtomSpec{spec.atoms, false, {}}, std::nullopt, 0);
    report_kernel(nullspace(collective_lowering(atomic, g), opt.tol), dir / (spec.name + ".collective.csv"));
    return 0;
  }

  if (opt.black_delta > 0.0) {
    report_kernel(black_subspace(model, opt.black_delta, opt.tol), dir / (spec.name + ".black.csv"));
    return 0;
  }

  Eigen::MatrixXd g_now = model.couplings(opt.time);
  if (!opt.couplings.empty()) {
    if (spec.cavities != 1 || static_cast<int>(opt.couplings.size()) != spec.atoms)
      throw std::invalid_argument("--g needs one coupling per atom of a one-cavity model");
    for (int k = 0; k < spec.atoms; ++k) g_now(0, k) = opt.couplings[static_cast<std::size_t>(k)];
  }
  report_kernel(dark_subspace(model.space, g_now, opt.tol), dir / (spec.name + ".darkspace.csv"));
  return 0;
}

int cmd_converge(const Selection& sel) {
  for (const auto& spec : sel.specs()) {
    const auto report = converge_experiment(spec);
    std::cout << spec.name << " dt=" << format_number(spec.run.dt) << '\n';
    std::cout << "floor = " << format_number(report.floor) << '\n';
    for (const auto& [name, f] : report.observable_floors) std::cout << "floor[" << name << "] = " << format_number(f) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tavis-Cummings dark-state simulator"};
  app.require_subcommand(1);

  Selection run_sel, spec_sel, dark_sel, conv_sel;
  int workers = 1;
  bool with_floor = false;
  DarkOptions dark;

  app.add_subcommand("list", "List built-in experiments");
  auto* run = app.add_subcommand("run", "Run experiments, write <name>.csv and <name>.manifest.txt");
  run_sel.attach(run, true);
  run->add_option("-j,--workers", workers, "Concurrent experiments")->check(CLI::PositiveNumber);
  run->add_flag("--floor", with_floor, "Also run the step-halving check and record floors in the manifest");

  auto* spectrum = app.add_subcommand("spectrum", "Write the level flow of H(t)");
  spec_sel.attach(spectrum, false);

  auto* darkspace = app.add_subcommand("darkspace", "Rank and nullity of the dark (or black) subspace");
  dark_sel.attach(darkspace, false);
  darkspace->add_option("-t,--time", dark.time, "Evaluate couplings at this time");
  darkspace->add_option("--g", dark.couplings, "Explicit per-atom couplings");
  darkspace->add_option("--black", dark.black_delta, "Black subspace for this delay");
  darkspace->add_flag("--collective", dark.collective, "Kernel of the collective lowering operator on the atoms alone");
  darkspace->add_option("--graph", dark.graph, "Cavity bridges 'i-j ...' for the two-atom graph dark state");
  darkspace->add_option("--tol", dark.tol, "Relative singular-value threshold");

  auto* converge = app.add_subcommand("converge", "Step-halving numerical floor");
  conv_sel.attach(converge, false);

  Selection cfg_sel;
  auto* config = app.add_subcommand("config", "Print the effective configuration");
  cfg_sel.attach(config, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    if (app.got_subcommand("list")) return cmd_list();
    if (run->parsed()) return cmd_run(run_sel, workers, with_floor);
    if (spectrum->parsed()) return cmd_spectrum(spec_sel);
    if (darkspace->parsed()) return cmd_darkspace(dark_sel, dark);
    if (converge->parsed()) return cmd_converge(conv_sel);
    if (config->parsed()) return cmd_config(cfg_sel);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
