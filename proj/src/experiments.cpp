#include "tcdark/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include "tcdark/config.hpp"
#include "tcdark/darkspace.hpp"

namespace tcdark {

std::string to_string(ExperimentKind kind) { return kind == ExperimentKind::spectrum ? "spectrum" : "trajectory"; }

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "trajectory") return ExperimentKind::trajectory;
  if (name == "spectrum") return ExperimentKind::spectrum;
  throw std::invalid_argument("unknown experiment kind '" + name + "' (expected trajectory or spectrum)");
}

std::string to_string(DriveTarget target) { return target == DriveTarget::tunneling ? "tunneling" : "coupling"; }

DriveTarget parse_drive_target(const std::string& name) {
  if (name == "coupling") return DriveTarget::coupling;
  if (name == "tunneling") return DriveTarget::tunneling;
  throw std::invalid_argument("unknown drive target '" + name + "' (expected coupling or tunneling)");
}

void ExperimentSpec::validate() const {
  auto fail = [&](const std::string& msg) { throw std::invalid_argument("experiment '" + name + "': " + msg); };
  if (name.empty()) fail("name must not be empty");
  if (cavities < 1) fail("model.cavities must be >= 1");
  if (atoms < 1) fail("model.atoms must be >= 1");
  if (sector < 0) fail("model.sector must be >= 0");
  if (!mobile && !home.empty()) {
    if (static_cast<int>(home.size()) != atoms) fail("model.home needs one cavity per atom");
    for (int c : home)
      if (c < 0 || c >= cavities) fail("model.home entry out of range");
  }
  for (auto [u, v] : edges)
    if (u < 0 || v < 0 || u >= cavities || v >= cavities || u == v) fail("model.edges entry out of range");
  if (!std::isfinite(omega) || !std::isfinite(g) || !std::isfinite(mu_ph) || !std::isfinite(mu_at))
    fail("parameters must be finite");
  if (g < 0.0) fail("params.g must be >= 0");
  schedule.validate();
  for (int k : driven_atoms)
    if (k < 0 || k >= atoms) fail("schedule.driven atom out of range");
  if (target == DriveTarget::tunneling && !mobile) fail("schedule.target=tunneling needs mobile atoms");
  for (auto [a, b] : pairs)
    if (a < 0 || b < 0 || a >= atoms || b >= atoms || a == b) fail("initial.pairs entry out of range");
  if (mobile && static_cast<int>(cavity_weights.size()) != cavities)
    fail("initial.weights needs one weight per cavity for mobile atoms");
  EvolutionConfig cfg = run;
  cfg.duration = schedule.duration;
  cfg.validate();
  if (kind == ExperimentKind::trajectory && observables.empty()) fail("observables must not be empty");
  if (spectrum_points < 2) fail("spectrum.points must be >= 2");
}

namespace {

ExperimentSpec one_cavity_base() {
  ExperimentSpec s;
  s.cavities = 1;
  s.mobile = false;
  s.omega = 1e7;
  s.g = 2e8;
  s.frame = Frame::rotating;
  s.schedule = Schedule::gaussian_bump(1e-5);
  s.run.dt = 1e-11;
  s.run.sample_every = 100;
  s.run.backend = Backend::dense_spectral;
  return s;
}

ExperimentSpec two_cavity_base() {
  ExperimentSpec s;
  s.cavities = 2;
  s.mobile = true;
  s.omega = 1e7;
  s.g = 2e8;
  s.mu_ph = 9e7;
  s.mu_at = 8e7;
  s.frame = Frame::rotating;
  s.schedule = Schedule::gaussian_bump(200.0);
  s.cavity_weights = {1.0, -1.0};
  s.run.dt = 0.01;
  s.run.sample_every = 10;
  s.run.backend = Backend::dense_spectral;
  return s;
}

std::vector<ExperimentSpec> make_registry() {
  std::vector<ExperimentSpec> out;

  auto e1 = one_cavity_base();
  e1.name = "one-cavity-2atoms";
  e1.alias = "E1";
  e1.description = "two fixed atoms, g2 driven by a Gaussian bump, singlet start";
  e1.atoms = 2;
  e1.sector = 1;
  e1.driven_atoms = {1};
  e1.pairs = {{0, 1}};
  e1.observables = {"P_free", "fidelity_init", "pop[|1|0@0 0@0⟩]", "dark_overlap", "P_n[1]"};
  out.push_back(e1);

  auto e2 = one_cavity_base();
  e2.name = "one-cavity-4atoms";
  e2.alias = "E2";
  e2.description = "four fixed atoms, g2 and g4 driven by a Gaussian bump, two-singlet start";
  e2.atoms = 4;
  e2.sector = 2;
  e2.driven_atoms = {1, 3};
  e2.pairs = {{0, 1}, {2, 3}};
  e2.observables = {"P_free", "fidelity_init", "P_n[1]", "P_n[2]", "witness", "dark_overlap"};
  out.push_back(e2);

  auto e2f = e2;
  e2f.name = "one-cavity-4atoms-fast";
  e2f.alias = "E2f";
  e2f.description = "E2 with a ten times faster Gaussian, observed over the first tenth of T";
  e2f.schedule.speedup = 10.0;
  e2f.run.stop_time = 0.1 * e2f.schedule.duration;
  out.push_back(e2f);

  auto e2c = e2;
  e2c.name = "one-cavity-4atoms-cosine";
  e2c.alias = "E2c";
  e2c.description = "E2 with the cosine schedule";
  e2c.schedule = Schedule::cosine(e2.schedule.duration);
  out.push_back(e2c);

  auto e3 = e2;
  e3.name = "spectral-flow";
  e3.alias = "E3";
  e3.description = "levels of H(t) over the E2 schedule, lab frame";
  e3.kind = ExperimentKind::spectrum;
  e3.frame = Frame::lab;
  e3.spectrum_points = 201;
  out.push_back(e3);

  auto e4 = two_cavity_base();
  e4.name = "two-cavity-2atoms";
  e4.alias = "E4";
  e4.description = "two mobile atoms in two cavities, g of atom 2 driven in both, start |s1> - |s2>";
  e4.atoms = 2;
  e4.sector = 1;
  e4.driven_atoms = {1};
  e4.pairs = {{0, 1}};
  e4.observables = {"P_free", "fidelity_init", "P_apart", "P_ph[1 0]", "P_ph[0 1]", "dark_overlap"};
  out.push_back(e4);

  auto e5 = two_cavity_base();
  e5.name = "two-cavity-tunneling-ramp";
  e5.alias = "E5";
  e5.description = "E4 geometry with constant g and the atom-tunneling amplitude ramped by a Gaussian bump";
  e5.atoms = 2;
  e5.sector = 1;
  e5.target = DriveTarget::tunneling;
  e5.pairs = {{0, 1}};
  e5.observables = {"P_free", "fidelity_init", "P_apart", "dark_overlap"};
  out.push_back(e5);

  auto e6 = two_cavity_base();
  e6.name = "two-cavity-4atoms";
  e6.alias = "E6";
  e6.description = "four mobile atoms in two cavities, g of atoms 2 and 4 driven, start (|s1>-|s2>)(|s1>-|s2>)";
  e6.atoms = 4;
  e6.sector = 2;
  e6.driven_atoms = {1, 3};
  e6.pairs = {{0, 1}, {2, 3}};
  e6.run.backend = Backend::dense_spectral;
  e6.observables = {"P_free", "fidelity_init", "P_apart", "P_n[1]", "P_n[2]"};
  out.push_back(e6);

  for (const auto& s : out) s.validate();
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

EvolutionConfig evolution_config(const ExperimentSpec& spec) {
  EvolutionConfig cfg = spec.run;
  cfg.duration = spec.schedule.duration;
  return cfg;
}

}  // namespace

const std::vector<ExperimentSpec>& builtin_experiments() {
  static const std::vector<ExperimentSpec> registry = make_registry();
  return registry;
}

ExperimentSpec find_experiment(const std::string& name) {
  std::string known;
  for (const auto& s : builtin_experiments()) {
    if (s.name == name || s.alias == name) return s;
    known += "\n  " + s.alias + "  " + s.name;
  }
  throw UnknownExperiment("unknown experiment '" + name + "'; registry:" + known);
}

SpacePtr build_space(const ExperimentSpec& spec) {
  spec.validate();
  AtomSpec atoms{spec.atoms, spec.mobile, spec.mobile ? std::vector<int>{} : spec.home};
  return HilbertSpace::enumerate(spec.cavities, atoms, spec.sector, spec.cutoff);
}

DrivenModel build_model(const ExperimentSpec& spec) {
  DrivenModel model;
  model.space = build_space(spec);
  const int k = spec.cavities, n = spec.atoms;
  const auto& atoms = model.space->atom_spec();

  ModelParams p = ModelParams::zeros(k, n);
  p.omega = spec.omega;
  p.frame = spec.frame;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < k; ++c)
      if (spec.mobile || atoms.home_of(a) == c) p.g_base(c, a) = spec.g;

  std::vector<std::pair<int, int>> edges = spec.edges;
  if (edges.empty())
    for (int c = 0; c + 1 < k; ++c) edges.emplace_back(c, c + 1);
  Eigen::MatrixXd hop = Eigen::MatrixXd::Zero(k, k);
  for (auto [u, v] : edges) hop(u, v) = hop(v, u) = 1.0;
  p.mu_ph = spec.mu_ph * hop;
  if (spec.mobile) p.mu_at.assign(static_cast<std::size_t>(n), spec.mu_at * hop);
  p.validate(k, n);
  model.params = std::move(p);

  if (spec.target == DriveTarget::tunneling) {
    model.tunnel_schedule = spec.schedule;
  } else {
    for (int a : spec.driven_atoms)
      for (int c = 0; c < k; ++c)
        if (model.params.g_base(c, a) != 0.0) model.assignment.add(c, a, spec.schedule);
  }
  return model;
}

StateVector build_initial(const ExperimentSpec& spec, const DrivenModel& model) {
  if (spec.pairs.empty()) throw std::invalid_argument("experiment '" + spec.name + "': initial.pairs is empty");
  const Eigen::MatrixXd g0 = model.couplings(0.0);
  const auto& atoms = model.space->atom_spec();
  std::vector<PairSuperposition> pairs;
  for (auto [a, b] : spec.pairs) {
    PairSuperposition p{a, b, {}, 1.0, 1.0};
    if (spec.mobile) {
      for (int c = 0; c < spec.cavities; ++c)
        if (spec.cavity_weights[static_cast<std::size_t>(c)] != 0.0)
          p.cavity_weights.emplace_back(c, spec.cavity_weights[static_cast<std::size_t>(c)]);
    } else {
      p.cavity_weights.emplace_back(atoms.home_of(a), 1.0);
    }
    if (p.cavity_weights.empty()) throw std::invalid_argument("experiment '" + spec.name + "': all cavity weights are zero");
    const int c0 = p.cavity_weights.front().first;
    p.g_a = g0(c0, a);
    p.g_b = g0(c0, b);
    if (p.g_a == 0.0 && p.g_b == 0.0) p.g_a = p.g_b = 1.0;
    pairs.push_back(std::move(p));
  }
  return pair_product_state(*model.space, pairs);
}

ExperimentRun run_experiment(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::trajectory)
    throw std::invalid_argument("experiment '" + spec.name + "' is a spectrum experiment");
  const auto start = std::chrono::steady_clock::now();
  const DrivenModel model = build_model(spec);
  const StateVector initial = build_initial(spec, model);
  const auto observers = make_observables(spec.observables, model.space, initial);
  ExperimentRun out{spec, evolve(initial, model, evolution_config(spec), observers), 0.0};
  out.seconds = seconds_since(start);
  return out;
}

ConvergenceReport converge_experiment(const ExperimentSpec& spec) {
  const DrivenModel model = build_model(spec);
  const StateVector initial = build_initial(spec, model);
  const auto observers = make_observables(spec.observables, model.space, initial);
  return convergence_check(initial, model, evolution_config(spec), observers);
}

SpectralFlow spectrum_experiment(const ExperimentSpec& spec) {
  const DrivenModel model = build_model(spec);
  const double end = evolution_config(spec).end_time();
  std::vector<double> times;
  const int m = spec.spectrum_points;
  for (int j = 0; j < m; ++j) times.push_back(j == m - 1 ? end : end * j / (m - 1));
  return spectral_flow(model, times);
}

std::vector<ExperimentRun> run_experiments(std::span<const ExperimentSpec> specs, int workers) {
  std::vector<ExperimentRun> results(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < specs.size();) {
      try {
        results[i] = run_experiment(specs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto count = static_cast<std::size_t>(std::max(1, workers));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(count, specs.size()); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

RunComparison compare_runs(const TrajectoryRecord& a, const TrajectoryRecord& b, const std::string& observable) {
  if (!a.has(observable) || !b.has(observable))
    throw std::invalid_argument("compare_runs: both runs need observable '" + observable + "'");
  const auto& ya = a.column(observable);
  const auto& yb = b.column(observable);
  if (ya.empty() || yb.empty()) throw std::invalid_argument("compare_runs: empty trajectory");
  RunComparison out;
  out.max_a = *std::max_element(ya.begin(), ya.end());
  out.max_b = *std::max_element(yb.begin(), yb.end());
  out.ratio = out.max_b != 0.0 ? out.max_a / out.max_b : std::numeric_limits<double>::infinity();

  const double lo = std::max(a.times.front(), b.times.front());
  const double hi = std::min(a.times.back(), b.times.back());
  if (lo > hi) throw std::invalid_argument("compare_runs: time windows do not overlap");
  std::size_t j = 0;
  bool any = false;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const double t = a.times[i];
    if (t < lo || t > hi) continue;
    while (j + 1 < b.times.size() && b.times[j + 1] < t) ++j;
    double v = yb[j];
    if (j + 1 < b.times.size() && b.times[j + 1] > b.times[j] && t > b.times[j]) {
      const double w = (t - b.times[j]) / (b.times[j + 1] - b.times[j]);
      v = (1.0 - w) * yb[j] + w * yb[j + 1];
    }
    out.distance = std::max(out.distance, std::abs(ya[i] - v));
    any = true;
  }
  if (!any) throw std::invalid_argument("compare_runs: no shared sample times");
  return out;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
  os << 't';
  for (const auto& n : record.names) os << ',' << n;
  os << '\n';
  for (std::size_t i = 0; i < record.times.size(); ++i) {
    os << format_number(record.times[i]);
    for (const auto& col : record.columns) os << ',' << format_number(col[i]);
    os << '\n';
  }
}

void write_spectrum_csv(std::ostream& os, const SpectralFlow& flow) {
  const Eigen::Index n = flow.levels.empty() ? 0 : flow.levels.front().size();
  os << 't';
  for (Eigen::Index j = 0; j < n; ++j) os << ",level[" << j << ']';
  for (Eigen::Index j = 0; j + 1 < n; ++j) os << ",degenerate[" << j << ']';
  os << '\n';
  for (std::size_t i = 0; i < flow.times.size(); ++i) {
    os << format_number(flow.times[i]);
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_number(flow.levels[i](j));
    for (bool d : flow.degenerate[i]) os << ',' << (d ? 1 : 0);
    os << '\n';
  }
}

void write_manifest(std::ostream& os, const ExperimentSpec& spec, const TrajectoryRecord* record,
                    const ConvergenceReport* convergence, double seconds) {
  os << "# tcdark run manifest\n";
  write_config(os, spec);
  const auto space = build_space(spec);
  os << "\n# derived\n";
  os << "dim = " << space->dim() << '\n';
  os << "g_T = " << format_number(spec.g * spec.schedule.duration) << '\n';
  os << "end_time = " << format_number(evolution_config(spec).end_time()) << '\n';
  if (record) {
    os << "steps = " << record->steps << '\n';
    os << "samples = " << record->times.size() << '\n';
    os << "norm_drift = " << format_number(record->norm_drift) << '\n';
    for (std::size_t c = 0; c < record->names.size(); ++c) {
      const auto& col = record->columns[c];
      if (!col.empty())
        os << "max[" << record->names[c] << "] = " << format_number(*std::max_element(col.begin(), col.end())) << '\n';
    }
  }
  if (convergence) {
    os << "floor = " << format_number(convergence->floor) << '\n';
    for (const auto& [name, f] : convergence->observable_floors) os << "floor[" << name << "] = " << format_number(f) << '\n';
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", seconds);
  os << "seconds = " << buf << '\n';
}

}  // namespace tcdark
