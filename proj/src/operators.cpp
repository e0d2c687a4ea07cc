#include "tcdark/operators.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace tcdark {

namespace {

SparseMatrix to_sparse(const DenseMatrix& m) {
  SparseMatrix s = m.sparseView(0.0, 0.0);
  s.makeCompressed();
  return s;
}

bool use_dense(Eigen::Index dim) { return dim <= OperatorMatrix::kDenseLimit; }

// Builds an operator from its action on each basis state; images outside the
// space are dropped.
using Action = std::function<void(const BasisState&, std::vector<std::pair<BasisState, cplx>>&)>;

OperatorMatrix from_action(const SpacePtr& space, const Action& action) {
  std::vector<Triplet> entries;
  std::vector<std::pair<BasisState, cplx>> images;
  const auto basis = space->basis();
  for (std::size_t col = 0; col < basis.size(); ++col) {
    images.clear();
    action(basis[col], images);
    for (const auto& [target, c] : images) {
      if (c == cplx{}) continue;
      if (auto row = space->find(target))
        entries.emplace_back(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col), c);
    }
  }
  return OperatorMatrix(space, entries);
}

void check_cavity(const HilbertSpace& space, int cavity, const char* what) {
  if (cavity < 0 || cavity >= space.cavities()) throw std::out_of_range(std::string(what) + ": cavity index out of range");
}

void check_atom(const HilbertSpace& space, int atom, const char* what) {
  if (atom < 0 || atom >= space.atom_count()) throw std::out_of_range(std::string(what) + ": atom index out of range");
}

}  // namespace

OperatorMatrix::OperatorMatrix(SpacePtr space, const std::vector<Triplet>& entries) : space_(std::move(space)) {
  const Eigen::Index n = dim();
  SparseMatrix s(n, n);
  s.setFromTriplets(entries.begin(), entries.end());
  s.makeCompressed();
  if (use_dense(n))
    data_ = DenseMatrix(s);
  else
    data_ = std::move(s);
}

OperatorMatrix::OperatorMatrix(SpacePtr space, DenseMatrix m) : space_(std::move(space)) {
  if (m.rows() != dim() || m.cols() != dim()) throw std::invalid_argument("OperatorMatrix: dimension mismatch");
  if (use_dense(dim()))
    data_ = std::move(m);
  else
    data_ = to_sparse(m);
}

OperatorMatrix::OperatorMatrix(SpacePtr space, SparseMatrix m) : space_(std::move(space)) {
  if (m.rows() != dim() || m.cols() != dim()) throw std::invalid_argument("OperatorMatrix: dimension mismatch");
  if (use_dense(dim())) {
    data_ = DenseMatrix(m);
  } else {
    m.makeCompressed();
    data_ = std::move(m);
  }
}

OperatorMatrix OperatorMatrix::zero(SpacePtr space) { return OperatorMatrix(std::move(space), std::vector<Triplet>{}); }

DenseMatrix OperatorMatrix::dense() const {
  if (auto d = dense_view()) return *d;
  return DenseMatrix(std::get<SparseMatrix>(data_));
}

SparseMatrix OperatorMatrix::sparse() const {
  if (auto s = sparse_view()) return *s;
  return to_sparse(std::get<DenseMatrix>(data_));
}

cplx OperatorMatrix::coeff(Eigen::Index row, Eigen::Index col) const {
  if (row < 0 || col < 0 || row >= dim() || col >= dim()) throw std::out_of_range("OperatorMatrix::coeff");
  if (auto d = dense_view()) return (*d)(row, col);
  return std::get<SparseMatrix>(data_).coeff(row, col);
}

StateVector OperatorMatrix::apply(const StateVector& v) const {
  if (v.size() != dim()) throw std::invalid_argument("OperatorMatrix::apply: dimension mismatch");
  return std::visit([&](const auto& m) -> StateVector { return m * v; }, data_);
}

double OperatorMatrix::max_abs() const {
  if (auto d = dense_view()) return d->size() ? d->cwiseAbs().maxCoeff() : 0.0;
  const auto& s = std::get<SparseMatrix>(data_);
  double m = 0.0;
  for (Eigen::Index k = 0; k < s.nonZeros(); ++k) m = std::max(m, std::abs(s.valuePtr()[k]));
  return m;
}

OperatorMatrix OperatorMatrix::adjoint() const {
  if (auto d = dense_view()) return OperatorMatrix(space_, DenseMatrix(d->adjoint()));
  return OperatorMatrix(space_, SparseMatrix(std::get<SparseMatrix>(data_).adjoint()));
}

void OperatorMatrix::require_same_space(const OperatorMatrix& other) const {
  if (dim() != other.dim()) throw std::invalid_argument("OperatorMatrix: dimension mismatch");
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& other) const {
  require_same_space(other);
  if (is_dense()) return OperatorMatrix(space_, DenseMatrix(*dense_view() + other.dense()));
  return OperatorMatrix(space_, SparseMatrix(*sparse_view() + other.sparse()));
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& other) const {
  require_same_space(other);
  if (is_dense()) return OperatorMatrix(space_, DenseMatrix(*dense_view() - other.dense()));
  return OperatorMatrix(space_, SparseMatrix(*sparse_view() - other.sparse()));
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& other) const {
  require_same_space(other);
  if (is_dense()) return OperatorMatrix(space_, DenseMatrix(*dense_view() * other.dense()));
  return OperatorMatrix(space_, SparseMatrix(*sparse_view() * other.sparse()));
}

OperatorMatrix OperatorMatrix::operator*(cplx s) const {
  return std::visit([&](const auto& m) { return OperatorMatrix(space_, std::decay_t<decltype(m)>(m * s)); }, data_);
}

void OperatorMatrix::add_scaled(const OperatorMatrix& other, double s) {
  require_same_space(other);
  if (auto d = std::get_if<DenseMatrix>(&data_)) {
    if (auto od = other.dense_view())
      *d += s * *od;
    else
      *d += s * other.dense();
  } else {
    auto& sp = std::get<SparseMatrix>(data_);
    sp = sp + s * (other.sparse_view() ? *other.sparse_view() : other.sparse());
  }
}

void OperatorMatrix::write_triplets(std::ostream& os) const {
  const SparseMatrix s = sparse();
  const auto old = os.precision(17);
  for (Eigen::Index r = 0; r < s.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(s, r); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
  os.precision(old);
}

double hermiticity_residual(const OperatorMatrix& h) {
  const double scale = h.max_abs();
  if (scale == 0.0) return 0.0;
  return (h - h.adjoint()).max_abs() / scale;
}

double commutator_norm(const OperatorMatrix& a, const OperatorMatrix& b) { return (a * b - b * a).max_abs(); }

ModelParams ModelParams::zeros(int cavities, int atoms) {
  ModelParams p;
  p.g_base = Eigen::MatrixXd::Zero(cavities, atoms);
  p.mu_ph = Eigen::MatrixXd::Zero(cavities, cavities);
  return p;
}

void ModelParams::validate(int cavities, int atoms) const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("ModelParams: " + msg); };
  if (!std::isfinite(omega)) fail("omega must be finite");
  if (g_base.rows() != cavities || g_base.cols() != atoms) fail("g_base must be cavities x atoms");
  if (!g_base.allFinite() || (g_base.array() < 0.0).any()) fail("g_base entries must be finite and non-negative");
  auto check_hop = [&](const Eigen::MatrixXd& m, const std::string& name) {
    if (m.rows() != cavities || m.cols() != cavities) fail(name + " must be cavities x cavities");
    if (!m.allFinite()) fail(name + " entries must be finite");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() != 0.0) fail(name + " must be symmetric");
    if (m.diagonal().cwiseAbs().maxCoeff() != 0.0) fail(name + " must have a zero diagonal");
  };
  check_hop(mu_ph, "mu_ph");
  if (!mu_at.empty()) {
    if (static_cast<int>(mu_at.size()) != atoms) fail("mu_at needs one matrix per atom");
    for (const auto& m : mu_at) check_hop(m, "mu_at");
  }
}

OperatorMatrix photon_annihilation(SpacePtr space, int cavity) {
  check_cavity(*space, cavity, "photon_annihilation");
  const auto c = static_cast<std::size_t>(cavity);
  return from_action(space, [c](const BasisState& s, auto& out) {
    if (s.photons[c] == 0) return;
    BasisState t = s;
    t.photons[c] -= 1;
    out.emplace_back(std::move(t), std::sqrt(static_cast<double>(s.photons[c])));
  });
}

OperatorMatrix photon_creation(SpacePtr space, int cavity) {
  check_cavity(*space, cavity, "photon_creation");
  const auto c = static_cast<std::size_t>(cavity);
  return from_action(space, [c](const BasisState& s, auto& out) {
    BasisState t = s;
    t.photons[c] += 1;
    out.emplace_back(std::move(t), std::sqrt(static_cast<double>(t.photons[c])));
  });
}

OperatorMatrix atomic_lowering(SpacePtr space, int atom, std::optional<int> at_position) {
  check_atom(*space, atom, "atomic_lowering");
  if (at_position) check_cavity(*space, *at_position, "atomic_lowering");
  const auto k = static_cast<std::size_t>(atom);
  return from_action(space, [k, at_position](const BasisState& s, auto& out) {
    const auto& a = s.atoms[k];
    if (a.level != 1) return;
    if (at_position && a.position != *at_position) return;
    BasisState t = s;
    t.atoms[k].level = 0;
    out.emplace_back(std::move(t), cplx{1.0});
  });
}

OperatorMatrix atom_tunnel(SpacePtr space, int atom, int i, int j) {
  check_atom(*space, atom, "atom_tunnel");
  check_cavity(*space, i, "atom_tunnel");
  check_cavity(*space, j, "atom_tunnel");
  if (i == j) throw std::invalid_argument("atom_tunnel: cavities must differ");
  const auto k = static_cast<std::size_t>(atom);
  return from_action(space, [k, i, j](const BasisState& s, auto& out) {
    const int p = s.atoms[k].position;
    if (p != i && p != j) return;
    BasisState t = s;
    t.atoms[k].position = (p == i) ? j : i;
    out.emplace_back(std::move(t), cplx{1.0});
  });
}

OperatorMatrix excitation_number(SpacePtr space) {
  return from_action(space, [](const BasisState& s, auto& out) {
    out.emplace_back(s, cplx{static_cast<double>(total_excitation(s))});
  });
}

OperatorMatrix interaction_term(SpacePtr space, int cavity, int atom) {
  check_cavity(*space, cavity, "interaction_term");
  check_atom(*space, atom, "interaction_term");
  const auto c = static_cast<std::size_t>(cavity);
  const auto k = static_cast<std::size_t>(atom);
  return from_action(space, [c, k, cavity](const BasisState& s, auto& out) {
    const auto& a = s.atoms[k];
    if (a.position != cavity) return;
    BasisState t = s;
    if (a.level == 1) {  // a†σ
      t.atoms[k].level = 0;
      t.photons[c] += 1;
      out.emplace_back(std::move(t), std::sqrt(static_cast<double>(s.photons[c] + 1)));
    } else if (s.photons[c] > 0) {  // aσ†
      t.atoms[k].level = 1;
      t.photons[c] -= 1;
      out.emplace_back(std::move(t), std::sqrt(static_cast<double>(s.photons[c])));
    }
  });
}

OperatorMatrix interaction_raising(SpacePtr space, const Eigen::MatrixXd& g_now) {
  if (g_now.rows() != space->cavities() || g_now.cols() != space->atom_count())
    throw std::invalid_argument("interaction_raising: coupling table must be cavities x atoms");
  return from_action(space, [&g_now](const BasisState& s, auto& out) {
    for (std::size_t k = 0; k < s.atoms.size(); ++k) {
      const auto& a = s.atoms[k];
      if (a.level != 1) continue;
      const double g = g_now(a.position, static_cast<Eigen::Index>(k));
      if (g == 0.0) continue;
      BasisState t = s;
      t.atoms[k].level = 0;
      t.photons[static_cast<std::size_t>(a.position)] += 1;
      out.emplace_back(std::move(t), g * std::sqrt(static_cast<double>(s.photons[static_cast<std::size_t>(a.position)] + 1)));
    }
  });
}

OperatorMatrix collective_lowering(SpacePtr atomic_space, std::span<const double> g) {
  if (atomic_space->cutoff() != 0) throw std::invalid_argument("collective_lowering: expects an atoms-only space (photon cutoff 0)");
  if (static_cast<int>(g.size()) != atomic_space->atom_count())
    throw std::invalid_argument("collective_lowering: one coupling per atom required");
  return from_action(atomic_space, [g](const BasisState& s, auto& out) {
    for (std::size_t k = 0; k < s.atoms.size(); ++k) {
      if (s.atoms[k].level != 1 || g[k] == 0.0) continue;
      BasisState t = s;
      t.atoms[k].level = 0;
      out.emplace_back(std::move(t), cplx{g[k]});
    }
  });
}

HamiltonianTerms::HamiltonianTerms(SpacePtr space, const ModelParams& params)
    : space_(space), params_(params), fixed_(OperatorMatrix::zero(space)), tunneling_(OperatorMatrix::zero(space)) {
  const int nc = space->cavities();
  const int na = space->atom_count();
  params_.validate(nc, na);

  if (params_.frame == Frame::lab && params_.omega != 0.0) fixed_.add_scaled(excitation_number(space), params_.omega);

  for (int i = 0; i < nc; ++i) {
    for (int j = i + 1; j < nc; ++j) {
      const double mu = params_.mu_ph(i, j);
      if (mu == 0.0) continue;
      const auto hop = photon_creation(space, j) * photon_annihilation(space, i);
      fixed_.add_scaled(hop + hop.adjoint(), mu);
    }
  }

  if (!params_.mu_at.empty() && space->atom_spec().mobile) {
    for (int k = 0; k < na; ++k)
      for (int i = 0; i < nc; ++i)
        for (int j = i + 1; j < nc; ++j) {
          const double mu = params_.mu_at[static_cast<std::size_t>(k)](i, j);
          if (mu != 0.0) tunneling_.add_scaled(atom_tunnel(space, k, i, j), mu);
        }
  }

  // Fixed atoms only couple to their home cavity; other entries have no effect.
  for (int i = 0; i < nc; ++i)
    for (int k = 0; k < na; ++k)
      if (space->atom_spec().mobile || space->atom_spec().home_of(k) == i)
        couplings_.push_back({i, k, interaction_term(space, i, k)});
}

OperatorMatrix HamiltonianTerms::assemble(const Eigen::MatrixXd& g_now, double tunnel_scale) const {
  if (g_now.rows() != space_->cavities() || g_now.cols() != space_->atom_count())
    throw std::invalid_argument("build_hamiltonian: coupling table must be cavities x atoms");
  if (!g_now.allFinite() || !std::isfinite(tunnel_scale)) throw std::invalid_argument("build_hamiltonian: non-finite coupling");
  OperatorMatrix h = fixed_;
  for (const auto& c : couplings_) {
    const double g = g_now(c.cavity, c.atom);
    if (g != 0.0) h.add_scaled(c.term, g);
  }
  if (tunnel_scale != 0.0) h.add_scaled(tunneling_, tunnel_scale);
  return h;
}

OperatorMatrix build_hamiltonian(SpacePtr space, const ModelParams& params, const Eigen::MatrixXd& g_now,
                                 double tunnel_scale) {
  return HamiltonianTerms(std::move(space), params).assemble(g_now, tunnel_scale);
}

}  // namespace tcdark
