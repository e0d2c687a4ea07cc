#include "tcdark/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tcdark/darkspace.hpp"

namespace tcdark {

namespace {

void require_dim(const StateVector& state, const HilbertSpace& space) {
  if (state.size() != static_cast<Eigen::Index>(space.dim())) throw std::invalid_argument("state dimension does not match the space");
}

std::vector<int> parse_ints(const std::string& text) {
  std::istringstream is(text);
  std::vector<int> out;
  int v;
  while (is >> v) out.push_back(v);
  if (!is.eof()) throw std::invalid_argument("expected integers in '" + text + "'");
  return out;
}

// "name[arg]" -> arg, or nullopt if the name has a different stem.
std::optional<std::string> bracket_arg(const std::string& name, const std::string& stem) {
  if (name.size() < stem.size() + 2 || name.compare(0, stem.size() + 1, stem + "[") != 0 || name.back() != ']')
    return std::nullopt;
  return name.substr(stem.size() + 1, name.size() - stem.size() - 2);
}

}  // namespace

cplx amplitude(const StateVector& state, const HilbertSpace& space, const BasisState& label) {
  require_dim(state, space);
  return state(static_cast<Eigen::Index>(space.index_of(label)));
}

double free_photon_probability(const StateVector& state, const HilbertSpace& space) {
  require_dim(state, space);
  double p = 0.0;
  for (std::size_t i = 0; i < space.dim(); ++i)
    if (photon_total(space.state(i)) > 0) p += std::norm(state(static_cast<Eigen::Index>(i)));
  return p;
}

double photon_number_probability(const StateVector& state, const HilbertSpace& space, const std::vector<int>& config) {
  require_dim(state, space);
  if (static_cast<int>(config.size()) != space.cavities()) throw std::invalid_argument("photon configuration needs one entry per cavity");
  double p = 0.0;
  for (std::size_t i = 0; i < space.dim(); ++i)
    if (space.state(i).photons == config) p += std::norm(state(static_cast<Eigen::Index>(i)));
  return p;
}

double photon_total_probability(const StateVector& state, const HilbertSpace& space, int total) {
  require_dim(state, space);
  double p = 0.0;
  for (std::size_t i = 0; i < space.dim(); ++i)
    if (photon_total(space.state(i)) == total) p += std::norm(state(static_cast<Eigen::Index>(i)));
  return p;
}

double apart_probability(const StateVector& state, const HilbertSpace& space) {
  require_dim(state, space);
  double p = 0.0;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const auto& atoms = space.state(i).atoms;
    const bool together = std::all_of(atoms.begin(), atoms.end(),
                                      [&](const AtomState& a) { return a.position == atoms.front().position; });
    if (!together) p += std::norm(state(static_cast<Eigen::Index>(i)));
  }
  return p;
}

PhotonDensity reduced_photon_density(const StateVector& state, const HilbertSpace& space) {
  require_dim(state, space);
  PhotonDensity rho;
  rho.labels = space.photon_configurations();
  std::map<std::vector<int>, Eigen::Index> row;
  for (std::size_t c = 0; c < rho.labels.size(); ++c) row.emplace(rho.labels[c], static_cast<Eigen::Index>(c));

  // Amplitudes grouped by atomic configuration: atoms -> [(photon row, amplitude)].
  std::map<std::vector<AtomState>, std::vector<std::pair<Eigen::Index, cplx>>> by_atoms;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const auto& s = space.state(i);
    by_atoms[s.atoms].emplace_back(row.at(s.photons), state(static_cast<Eigen::Index>(i)));
  }
  const auto n = static_cast<Eigen::Index>(rho.labels.size());
  rho.matrix = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [atoms, amps] : by_atoms)
    for (const auto& [r, a] : amps)
      for (const auto& [c, b] : amps) rho.matrix(r, c) += a * std::conj(b);
  return rho;
}

double fidelity(const StateVector& state, const StateVector& reference) {
  if (state.size() != reference.size()) throw std::invalid_argument("fidelity: dimension mismatch");
  return std::norm(reference.dot(state));
}

double dark_overlap(const StateVector& state, SpacePtr space, const Eigen::MatrixXd& g_now) {
  const DarkBasis dark = dark_subspace(space, g_now);
  if (dark.nullity == 0) return 0.0;
  return (dark.vectors.adjoint() * state).squaredNorm();
}

Eigen::VectorXd spectrum(const OperatorMatrix& h) {
  const double r = hermiticity_residual(h);
  if (r > 1e-12) throw NumericalError("spectrum: matrix is not Hermitian (relative residual " + std::to_string(r) + ")");
  const DenseMatrix d = h.dense();
  if (d.size() && d.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.real(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

SpectralFlow spectral_flow(const DrivenModel& model, std::span<const double> times, double degeneracy_fraction) {
  SpectralFlow flow;
  flow.degeneracy_fraction = degeneracy_fraction;
  const HamiltonianTerms terms(model.space, model.params);
  for (double t : times) {
    const Eigen::VectorXd ev = spectrum(terms.assemble(model.couplings(t), model.tunnel_scale(t)));
    const double range = ev.size() ? ev.maxCoeff() - ev.minCoeff() : 0.0;
    std::vector<bool> flags;
    for (Eigen::Index j = 0; j + 1 < ev.size(); ++j) flags.push_back(ev(j + 1) - ev(j) <= degeneracy_fraction * range);
    flow.times.push_back(t);
    flow.levels.push_back(ev);
    flow.degenerate.push_back(std::move(flags));
  }
  return flow;
}

int count_humps(std::span<const double> series, double floor, double prominence_fraction) {
  const auto n = series.size();
  if (n < 3) return 0;
  const double top = *std::max_element(series.begin(), series.end());
  int humps = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // Plateaus count once, at their left end.
    if (!(series[i] > series[i - 1])) continue;
    std::size_t j = i;
    while (j + 1 < n && series[j + 1] == series[i]) ++j;
    if (j + 1 >= n || !(series[j + 1] < series[i])) continue;
    const double peak = series[i];
    if (peak <= floor) continue;
    double left_min = peak;
    for (std::size_t k = i; k-- > 0;) {
      if (series[k] > peak) break;
      left_min = std::min(left_min, series[k]);
    }
    double right_min = peak;
    for (std::size_t k = j + 1; k < n; ++k) {
      if (series[k] > peak) break;
      right_min = std::min(right_min, series[k]);
    }
    if (peak - std::max(left_min, right_min) >= prominence_fraction * top) ++humps;
  }
  return humps;
}

std::vector<NamedObservable> make_observables(const std::vector<std::string>& names, SpacePtr space,
                                              const StateVector& initial) {
  std::vector<NamedObservable> out;
  for (const auto& name : names) {
    ObservableFn fn;
    if (name == "P_free") {
      fn = [](const StateVector& psi, const ObservationContext& c) { return free_photon_probability(psi, c.space); };
    } else if (name == "P_apart") {
      fn = [](const StateVector& psi, const ObservationContext& c) { return apart_probability(psi, c.space); };
    } else if (name == "fidelity_init") {
      fn = [initial](const StateVector& psi, const ObservationContext&) { return fidelity(psi, initial); };
    } else if (name == "dark_overlap") {
      fn = [space](const StateVector& psi, const ObservationContext& c) { return dark_overlap(psi, space, c.g_now); };
    } else if (name == "witness") {
      if (space->cavities() != 1 || space->atom_count() != 4)
        throw std::invalid_argument("observable 'witness' needs four atoms in one cavity");
      fn = [](const StateVector& psi, const ObservationContext& c) { return darkness_witness(psi, c.space, c.g_now); };
    } else if (auto arg = bracket_arg(name, "P_n")) {
      const auto v = parse_ints(*arg);
      if (v.size() != 1 || v[0] < 0) throw std::invalid_argument("observable '" + name + "': expected P_n[<count>]");
      const int total = v[0];
      fn = [total](const StateVector& psi, const ObservationContext& c) { return photon_total_probability(psi, c.space, total); };
    } else if (auto arg = bracket_arg(name, "P_ph")) {
      auto config = parse_ints(*arg);
      if (static_cast<int>(config.size()) != space->cavities())
        throw std::invalid_argument("observable '" + name + "': one photon count per cavity required");
      fn = [config](const StateVector& psi, const ObservationContext& c) {
        return photon_number_probability(psi, c.space, config);
      };
    } else if (auto arg = bracket_arg(name, "pop")) {
      std::optional<std::size_t> index;
      for (std::size_t i = 0; i < space->dim() && !index; ++i)
        if (space->label(i) == *arg) index = i;
      if (!index) throw std::invalid_argument("observable '" + name + "': no basis state with that label");
      const auto i = static_cast<Eigen::Index>(*index);
      fn = [i](const StateVector& psi, const ObservationContext&) { return std::norm(psi(i)); };
    } else {
      throw std::invalid_argument("unknown observable '" + name +
                                  "' (known: P_free, P_apart, P_n[k], P_ph[n1 ..], pop[<label>], fidelity_init, "
                                  "dark_overlap, witness)");
    }
    out.push_back({name, std::move(fn)});
  }
  return out;
}

}  // namespace tcdark
