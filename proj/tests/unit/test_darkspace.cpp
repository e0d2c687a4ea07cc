#include <doctest.h>

#include <sstream>

#include <Eigen/LU>

#include "tcdark/darkspace.hpp"
#include "tcdark/observables.hpp"

using namespace tcdark;

namespace {

// Σ g_k σ_k on n qubits with bit k set meaning atom k excited; built without the library.
Eigen::MatrixXd collective_oracle(const std::vector<double>& g) {
  const int n = static_cast<int>(g.size());
  const int d = 1 << n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int s = 0; s < d; ++s)
    for (int k = 0; k < n; ++k)
      if (s & (1 << k)) m(s & ~(1 << k), s) += g[static_cast<std::size_t>(k)];
  return m;
}

SpacePtr atoms_only(int n) { return HilbertSpace::enumerate(1, {n, false, {}}, std::nullopt, 0); }

}  // namespace

TEST_CASE("collective lowering kernel for generic couplings") {
  const std::vector<double> g{1.0, 0.7, 1.0, 0.3};
  Eigen::FullPivLU<Eigen::MatrixXd> lu(collective_oracle(g));
  const long oracle_rank = lu.rank();
  REQUIRE(oracle_rank == 10);

  const auto s = atoms_only(4);
  const auto op = collective_lowering(s, g);
  const DarkBasis k = nullspace(op);
  CHECK(k.rank == oracle_rank);
  CHECK(k.nullity == 16 - oracle_rank);
  CHECK(k.nullity == 6);
  for (Eigen::Index c = 0; c < k.vectors.cols(); ++c) {
    CHECK(op.apply(k.vectors.col(c)).norm() < 1e-9);
    CHECK(k.vectors.col(c).norm() == doctest::Approx(1.0));
  }
  CHECK((k.vectors.adjoint() * k.vectors - DenseMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two atoms with equal couplings") {
  const std::vector<double> g{1.0, 1.0};
  const DarkBasis k = nullspace(collective_lowering(atoms_only(2), g));
  CHECK(k.nullity == 2);
  CHECK(k.rank == 2);
}

TEST_CASE("dark subspace of the four-atom two-excitation sector") {
  const auto s = HilbertSpace::enumerate(1, {4, false, {}}, 2);
  Eigen::MatrixXd g(1, 4);
  g << 1.0, 0.7, 1.0, 0.3;
  const DarkBasis dark = dark_subspace(s, g);
  REQUIRE(dark.nullity == 2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    CHECK(is_dark(dark.vectors.col(c), s, g) < 1e-9);
    CHECK(free_photon_probability(dark.vectors.col(c), *s) < 1e-24);
    CHECK(darkness_witness(dark.vectors.col(c), *s, g) < 1e-12);
  }
  StateVector mix = dark.vectors.col(0) * cplx(0.6, 0.1) + dark.vectors.col(1) * cplx(-0.3, 0.7);
  CHECK(darkness_witness(mix, *s, g) < 1e-12);
}

TEST_CASE("deformed singlets are dark") {
  const auto s2 = HilbertSpace::enumerate(1, {2, false, {}}, 1);
  Eigen::MatrixXd g(1, 2);
  g << 1.0, 0.3;
  const StateVector psi = deformed_singlet(*s2, 0, 1, 0, 1.0, 0.3);
  CHECK(psi.norm() == doctest::Approx(1.0));
  CHECK(is_dark(psi, s2, g) < 1e-15);
  CHECK(is_dark(singlet_state(*s2, 0, 1, 0), s2, g) > 0.1);

  const auto s4 = HilbertSpace::enumerate(1, {4, false, {}}, 2);
  const PairSuperposition pairs[] = {{0, 1, {{0, 1.0}}, 1.0, 1.0}, {2, 3, {{0, 1.0}}, 1.0, 1.0}};
  const StateVector s1234 = pair_product_state(*s4, pairs);
  Eigen::MatrixXd g4 = Eigen::MatrixXd::Ones(1, 4);
  CHECK(is_dark(s1234, s4, g4) < 1e-15);
  CHECK(darkness_witness(s1234, *s4, g4) < 1e-15);
}

TEST_CASE("pair states need co-located fixed atoms") {
  const auto s = HilbertSpace::enumerate(2, {2, false, {0, 1}}, 1);
  CHECK_THROWS_AS(singlet_state(*s, 0, 1, 0), std::invalid_argument);
}

TEST_CASE("graph dark states") {
  const auto s2 = HilbertSpace::enumerate(2, {2, true, {}}, 1);
  CavityGraph k2{2, {{0, 1}}};
  CHECK(k2.is_even());
  const StateVector psi = graph_dark_state(k2, *s2);

  // Zero mode of the full two-cavity Hamiltonian with equal tunneling on the bridge.
  ModelParams p = ModelParams::zeros(2, 2);
  p.g_base.setConstant(2.0);
  p.mu_ph(0, 1) = p.mu_ph(1, 0) = 0.9;
  Eigen::MatrixXd bridge = Eigen::MatrixXd::Zero(2, 2);
  bridge(0, 1) = bridge(1, 0) = 0.8;
  p.mu_at = {bridge, bridge};
  CHECK(build_hamiltonian(s2, p, p.g_base).apply(psi).norm() < 1e-14);

  const auto s3 = HilbertSpace::enumerate(3, {2, true, {}}, 1);
  CavityGraph triangle{3, {{0, 1}, {1, 2}, {2, 0}}};
  CHECK_FALSE(triangle.is_even());
  CHECK_THROWS_AS(graph_dark_state(triangle, *s3), GraphNotEven);
  try {
    graph_dark_state(triangle, *s3);
  } catch (const GraphNotEven& e) {
    CHECK(std::string(e.what()).find("even") != std::string::npos);
  }
  CavityGraph path{3, {{0, 1}, {1, 2}}};
  CHECK(path.is_even());
  CHECK_NOTHROW(graph_dark_state(path, *s3));
  CHECK_THROWS(CavityGraph{3, {{0, 1}}}.distances());
}

TEST_CASE("black subspace contains stationary dark states") {
  DrivenModel m;
  m.space = HilbertSpace::enumerate(2, {2, true, {}}, 1);
  m.params = ModelParams::zeros(2, 2);
  m.params.g_base.setConstant(2.0);
  m.params.mu_ph(0, 1) = m.params.mu_ph(1, 0) = 0.9;
  Eigen::MatrixXd bridge = Eigen::MatrixXd::Zero(2, 2);
  bridge(0, 1) = bridge(1, 0) = 0.8;
  m.params.mu_at = {bridge, bridge};
  const StateVector psi = graph_dark_state(CavityGraph{2, {{0, 1}}}, *m.space);
  const DarkBasis black = black_subspace(m, 0.37);
  REQUIRE(black.nullity >= 1);
  CHECK((black.vectors.adjoint() * psi).norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS(black_subspace(m, 0.0));
}

TEST_CASE("kernel basis CSV") {
  const auto s = HilbertSpace::enumerate(1, {2, false, {}}, 1);
  Eigen::MatrixXd g = Eigen::MatrixXd::Ones(1, 2);
  std::ostringstream os;
  write_basis_csv(os, dark_subspace(s, g));
  const std::string text = os.str();
  CHECK(text.rfind("label,v0\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find("j\n") != std::string::npos);
}
