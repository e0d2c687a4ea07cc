#include <doctest.h>

#include <random>

#include "tcdark/operators.hpp"

using namespace tcdark;

namespace {

ModelParams random_params(std::mt19937& rng, int k, int n, bool mobile) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  ModelParams p = ModelParams::zeros(k, n);
  p.omega = u(rng);
  for (int c = 0; c < k; ++c)
    for (int a = 0; a < n; ++a) p.g_base(c, a) = u(rng);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) p.mu_ph(i, j) = p.mu_ph(j, i) = u(rng);
  if (mobile)
    for (int a = 0; a < n; ++a) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) m(i, j) = m(j, i) = u(rng);
      p.mu_at.push_back(m);
    }
  return p;
}

}  // namespace

TEST_CASE("Jaynes-Cummings block") {
  const auto s = HilbertSpace::enumerate(1, {1, false, {}}, 1);
  ModelParams p = ModelParams::zeros(1, 1);
  p.omega = 3.0;
  p.g_base(0, 0) = 0.7;
  const DenseMatrix rot = build_hamiltonian(s, p, p.g_base).dense();
  CHECK(rot(0, 1).real() == doctest::Approx(0.7));
  CHECK(rot(1, 0).real() == doctest::Approx(0.7));
  CHECK(std::abs(rot(0, 0)) == 0.0);
  p.frame = Frame::lab;
  const DenseMatrix lab = build_hamiltonian(s, p, p.g_base).dense();
  CHECK(lab(0, 0).real() == doctest::Approx(3.0));
  CHECK(lab(1, 1).real() == doctest::Approx(3.0));
}

TEST_CASE("Hermiticity and excitation conservation for random parameters") {
  std::mt19937 rng(7);
  for (int draw = 0; draw < 20; ++draw) {
    const bool mobile = draw % 2 == 1;
    const int k = mobile ? 2 : 1, n = mobile ? 2 : 4;
    const auto s = HilbertSpace::enumerate(k, {n, mobile, {}}, std::nullopt, 2);
    ModelParams p = random_params(rng, k, n, mobile);
    p.frame = draw % 4 < 2 ? Frame::lab : Frame::rotating;
    const auto h = build_hamiltonian(s, p, p.g_base);
    CHECK(hermiticity_residual(h) < 1e-12);
    CHECK(commutator_norm(h, excitation_number(s)) / h.max_abs() < 1e-12);
  }
}

TEST_CASE("photon ladder operators") {
  const auto s = HilbertSpace::enumerate(1, {1, false, {}}, std::nullopt, 3);
  const auto a = photon_annihilation(s, 0);
  const auto ad = photon_creation(s, 0);
  CHECK((ad.dense() - a.adjoint().dense()).cwiseAbs().maxCoeff() < 1e-15);
  const DenseMatrix comm = (a * ad - ad * a).dense();
  for (std::size_t i = 0; i < s->dim(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    if (s->state(i).photons[0] < 3) CHECK(comm(idx, idx).real() == doctest::Approx(1.0));
  }
}

TEST_CASE("atom tunneling preserves the level") {
  const auto s = HilbertSpace::enumerate(2, {2, true, {}}, 1);
  const auto t = atom_tunnel(s, 0, 0, 1);
  CHECK(hermiticity_residual(t) == 0.0);
  const DenseMatrix d = t.dense();
  for (Eigen::Index r = 0; r < d.rows(); ++r)
    for (Eigen::Index c = 0; c < d.cols(); ++c)
      if (d(r, c) != cplx{}) {
        const auto& a = s->state(static_cast<std::size_t>(r));
        const auto& b = s->state(static_cast<std::size_t>(c));
        CHECK(a.atoms[0].level == b.atoms[0].level);
        CHECK(a.atoms[0].position != b.atoms[0].position);
        CHECK(a.atoms[1] == b.atoms[1]);
        CHECK(a.photons == b.photons);
      }
}

TEST_CASE("sparse storage above the dense limit agrees with dense products") {
  std::mt19937 rng(11);
  const auto s = HilbertSpace::enumerate(2, {4, true, {}}, 2);
  REQUIRE(s->dim() > static_cast<std::size_t>(OperatorMatrix::kDenseLimit));
  const ModelParams p = random_params(rng, 2, 4, true);
  const auto h = build_hamiltonian(s, p, p.g_base);
  CHECK_FALSE(h.is_dense());
  StateVector v = StateVector::Random(h.dim());
  CHECK((h.apply(v) - h.dense() * v).norm() < 1e-12 * h.max_abs() * v.norm());
  CHECK(hermiticity_residual(h) < 1e-12);
}

TEST_CASE("precomputed terms match direct assembly") {
  std::mt19937 rng(3);
  const auto s = HilbertSpace::enumerate(2, {2, true, {}}, 1);
  const ModelParams p = random_params(rng, 2, 2, true);
  const HamiltonianTerms terms(s, p);
  Eigen::MatrixXd g = p.g_base;
  g(0, 1) *= 0.25;
  g(1, 1) *= 0.5;
  const DenseMatrix a = terms.assemble(g, 0.3).dense();
  const DenseMatrix b = build_hamiltonian(s, p, g, 0.3).dense();
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
  Eigen::MatrixXd bad = g;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(terms.assemble(bad));
}

TEST_CASE("parameter validation") {
  ModelParams p = ModelParams::zeros(2, 2);
  p.mu_ph(0, 1) = 1.0;
  CHECK_THROWS_AS(p.validate(2, 2), std::invalid_argument);
  p.mu_ph(1, 0) = 1.0;
  CHECK_NOTHROW(p.validate(2, 2));
  p.g_base(0, 0) = -1.0;
  CHECK_THROWS_AS(p.validate(2, 2), std::invalid_argument);
}

TEST_CASE("interaction raising only creates photons") {
  const auto s = HilbertSpace::enumerate(1, {2, false, {}}, 1);
  Eigen::MatrixXd g(1, 2);
  g << 1.0, 2.0;
  const DenseMatrix v = interaction_raising(s, g).dense();
  for (Eigen::Index r = 0; r < v.rows(); ++r)
    for (Eigen::Index c = 0; c < v.cols(); ++c)
      if (v(r, c) != cplx{})
        CHECK(photon_total(s->state(static_cast<std::size_t>(r))) == photon_total(s->state(static_cast<std::size_t>(c))) + 1);
}
