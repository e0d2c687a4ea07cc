#include "tcdark/darkspace.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace tcdark {

DarkBasis nullspace(const Eigen::MatrixXcd& a, double tol) {
  DarkBasis out;
  out.tolerance = tol;
  const Eigen::Index n = a.cols();
  if (n == 0) return out;
  if (!a.allFinite()) throw std::invalid_argument("nullspace: non-finite entries");

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  out.sigma_max = out.singular_values.size() ? out.singular_values(0) : 0.0;
  const double threshold = tol * out.sigma_max;
  Eigen::Index rank = 0;
  if (out.sigma_max > 0.0)
    for (Eigen::Index k = 0; k < out.singular_values.size(); ++k)
      if (out.singular_values(k) > threshold) ++rank;
  out.rank = rank;
  out.nullity = n - rank;
  out.vectors = svd.matrixV().rightCols(out.nullity);
  return out;
}

DarkBasis nullspace(const OperatorMatrix& a, double tol) {
  DarkBasis out = nullspace(a.dense(), tol);
  out.space = a.space_ptr();
  return out;
}

namespace {

std::vector<Eigen::Index> vacuum_indices(const HilbertSpace& space) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < space.dim(); ++i)
    if (photon_total(space.state(i)) == 0) idx.push_back(static_cast<Eigen::Index>(i));
  return idx;
}

// Kernel of a·P where P injects the photon-vacuum coordinates, lifted back to the full space.
DarkBasis vacuum_kernel(const SpacePtr& space, const Eigen::MatrixXcd& a, double tol) {
  const auto vac = vacuum_indices(*space);
  Eigen::MatrixXcd restricted(a.rows(), static_cast<Eigen::Index>(vac.size()));
  for (std::size_t c = 0; c < vac.size(); ++c) restricted.col(static_cast<Eigen::Index>(c)) = a.col(vac[c]);
  DarkBasis k = nullspace(restricted, tol);
  Eigen::MatrixXcd lifted = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(space->dim()), k.vectors.cols());
  for (std::size_t c = 0; c < vac.size(); ++c) lifted.row(vac[c]) = k.vectors.row(static_cast<Eigen::Index>(c));
  k.vectors = std::move(lifted);
  k.space = space;
  return k;
}

}  // namespace

DarkBasis dark_subspace(SpacePtr space, const Eigen::MatrixXd& g_now, double tol) {
  return vacuum_kernel(space, interaction_raising(space, g_now).dense(), tol);
}

DarkBasis black_subspace(const DrivenModel& model, double delta, double tol) {
  if (!(delta > 0.0)) throw std::invalid_argument("black_subspace: delta must be positive");
  const Eigen::MatrixXd g0 = model.couplings(0.0);
  const DenseMatrix h = build_hamiltonian(model.space, model.params, g0, model.tunnel_scale(0.0)).dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<cplx>() * cplx(0.0, -delta)).array().exp().matrix();
  const DenseMatrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return vacuum_kernel(model.space, interaction_raising(model.space, g0).dense() * u, tol);
}

void write_basis_csv(std::ostream& os, const DarkBasis& basis) {
  os << "label";
  for (Eigen::Index c = 0; c < basis.vectors.cols(); ++c) os << ",v" << c;
  os << '\n';
  char buf[64];
  for (Eigen::Index r = 0; r < basis.vectors.rows(); ++r) {
    if (basis.space)
      os << basis.space->label(static_cast<std::size_t>(r));
    else
      os << r;
    for (Eigen::Index c = 0; c < basis.vectors.cols(); ++c) {
      const cplx z = basis.vectors(r, c);
      std::snprintf(buf, sizeof buf, "%.12e%+.12ej", z.real(), z.imag());
      os << ',' << buf;
    }
    os << '\n';
  }
}

std::vector<int> CavityGraph::distances() const {
  if (vertices < 1) throw std::invalid_argument("cavity graph: needs at least one vertex");
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(vertices));
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertices || v >= vertices) throw std::invalid_argument("cavity graph: edge out of range");
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  std::vector<int> d(static_cast<std::size_t>(vertices), -1);
  std::deque<int> queue{0};
  d[0] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[static_cast<std::size_t>(u)])
      if (d[static_cast<std::size_t>(v)] < 0) {
        d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
  }
  for (int x : d)
    if (x < 0) throw std::invalid_argument("cavity graph: not connected");
  return d;
}

bool CavityGraph::is_even() const {
  const auto d = distances();
  for (auto [u, v] : edges)
    if ((d[static_cast<std::size_t>(u)] - d[static_cast<std::size_t>(v)]) % 2 == 0) return false;
  return true;
}

StateVector pair_product_state(const HilbertSpace& space, std::span<const PairSuperposition> pairs) {
  const int n = space.atom_count();
  const auto& spec = space.atom_spec();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (const auto& p : pairs) {
    for (int a : {p.atom_a, p.atom_b}) {
      if (a < 0 || a >= n) throw std::invalid_argument("pair state: atom index out of range");
      if (used[static_cast<std::size_t>(a)]) throw std::invalid_argument("pair state: atoms must be distinct");
      used[static_cast<std::size_t>(a)] = true;
    }
    if (p.cavity_weights.empty()) throw std::invalid_argument("pair state: no cavity weights");
    for (auto [c, w] : p.cavity_weights) {
      if (c < 0 || c >= space.cavities()) throw std::invalid_argument("pair state: cavity out of range");
      if (!spec.mobile && (spec.home_of(p.atom_a) != c || spec.home_of(p.atom_b) != c))
        throw std::invalid_argument("pair state: atoms " + std::to_string(p.atom_a) + " and " +
                                    std::to_string(p.atom_b) + " are not co-located in cavity " + std::to_string(c));
    }
  }

  BasisState ground;
  ground.photons.assign(static_cast<std::size_t>(space.cavities()), 0);
  for (int k = 0; k < n; ++k) ground.atoms.push_back({0, spec.mobile ? 0 : spec.home_of(k)});

  // Expand the tensor product term by term: each pair picks a cavity and which atom is excited.
  std::vector<std::pair<BasisState, cplx>> terms{{ground, cplx{1.0}}};
  for (const auto& p : pairs) {
    std::vector<std::pair<BasisState, cplx>> next;
    for (const auto& [state, amp] : terms) {
      for (auto [c, w] : p.cavity_weights) {
        for (int excited_b = 0; excited_b <= 1; ++excited_b) {
          BasisState s = state;
          auto& a = s.atoms[static_cast<std::size_t>(p.atom_a)];
          auto& b = s.atoms[static_cast<std::size_t>(p.atom_b)];
          a.position = b.position = c;
          a.level = excited_b ? 0 : 1;
          b.level = excited_b ? 1 : 0;
          const double coeff = excited_b ? p.g_a : -p.g_b;
          next.emplace_back(std::move(s), amp * w * coeff);
        }
      }
    }
    terms = std::move(next);
  }

  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(space.dim()));
  for (const auto& [state, amp] : terms) {
    if (amp == cplx{}) continue;
    const auto idx = space.find(state);
    if (!idx) throw std::invalid_argument("pair state: component " + format_label(state) + " is outside the space");
    psi(static_cast<Eigen::Index>(*idx)) += amp;
  }
  const double norm = psi.norm();
  if (norm == 0.0) throw std::invalid_argument("pair state: superposition vanishes");
  return psi / norm;
}

StateVector singlet_state(const HilbertSpace& space, int atom_a, int atom_b, int cavity) {
  return deformed_singlet(space, atom_a, atom_b, cavity, 1.0, 1.0);
}

StateVector deformed_singlet(const HilbertSpace& space, int atom_a, int atom_b, int cavity, double g_a, double g_b) {
  const PairSuperposition p{atom_a, atom_b, {{cavity, 1.0}}, g_a, g_b};
  return pair_product_state(space, std::span(&p, 1));
}

StateVector graph_dark_state(const CavityGraph& graph, const HilbertSpace& space) {
  if (graph.vertices != space.cavities()) throw std::invalid_argument("graph dark state: graph and space disagree on cavity count");
  if (!space.atom_spec().mobile || space.atom_count() != 2)
    throw std::invalid_argument("graph dark state: needs a space of two mobile atoms");
  const auto d = graph.distances();
  if (!graph.is_even()) throw GraphNotEven("graph not even: it contains an odd cycle, so no two-atom dark state exists");
  PairSuperposition p{0, 1, {}, 1.0, 1.0};
  for (int i = 0; i < graph.vertices; ++i) p.cavity_weights.emplace_back(i, (d[static_cast<std::size_t>(i)] % 2) ? -1.0 : 1.0);
  return pair_product_state(space, std::span(&p, 1));
}

double darkness_witness(const StateVector& state, const HilbertSpace& space, const Eigen::MatrixXd& g_now) {
  if (space.cavities() != 1 || space.atom_count() != 4)
    throw std::invalid_argument("darkness witness: defined for four atoms in one cavity");
  if (state.size() != static_cast<Eigen::Index>(space.dim())) throw std::invalid_argument("darkness witness: dimension mismatch");
  auto amplitude_of = [&](std::initializer_list<int> levels) {
    BasisState s;
    s.photons = {0};
    int k = 0;
    for (int l : levels) s.atoms.push_back({l, space.atom_spec().home_of(k++)});
    return state(static_cast<Eigen::Index>(space.index_of(s)));
  };
  const cplx l0101 = amplitude_of({0, 1, 0, 1});
  const cplx l1010 = amplitude_of({1, 0, 1, 0});
  const double g1 = g_now(0, 0), g2 = g_now(0, 1), g3 = g_now(0, 2), g4 = g_now(0, 3);
  return std::abs(g2 * g4 * l0101 - g1 * g3 * l1010);
}

double is_dark(const StateVector& state, SpacePtr space, const Eigen::MatrixXd& g_now) {
  return interaction_raising(std::move(space), g_now).apply(state).norm();
}

}  // namespace tcdark
