#include <doctest.h>

#include <cmath>
#include <random>

#include "tcdark/darkspace.hpp"
#include "tcdark/observables.hpp"

using namespace tcdark;

namespace {

StateVector random_state(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  StateVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(d(rng), d(rng));
  return v.normalized();
}

}  // namespace

TEST_CASE("photon probabilities are consistent") {
  const auto s = HilbertSpace::enumerate(2, {2, true, {}}, 2);
  const StateVector psi = random_state(static_cast<Eigen::Index>(s->dim()), 1);
  const double vac = photon_number_probability(psi, *s, {0, 0});
  CHECK(free_photon_probability(psi, *s) == doctest::Approx(1.0 - vac).epsilon(1e-12));
  double total = 0.0;
  for (const auto& cfg : s->photon_configurations()) total += photon_number_probability(psi, *s, cfg);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  double by_count = 0.0;
  for (int n = 0; n <= 2; ++n) by_count += photon_total_probability(psi, *s, n);
  CHECK(by_count == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(photon_number_probability(psi, *s, {0}));
}

TEST_CASE("reduced photon density") {
  const auto s = HilbertSpace::enumerate(2, {2, true, {}}, 2);
  const StateVector psi = random_state(static_cast<Eigen::Index>(s->dim()), 2);
  const PhotonDensity rho = reduced_photon_density(psi, *s);
  CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  for (std::size_t c = 0; c < rho.labels.size(); ++c) {
    const auto i = static_cast<Eigen::Index>(c);
    CHECK(std::abs(rho.matrix(i, i).real() - photon_number_probability(psi, *s, rho.labels[c])) < 1e-12);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix);
  CHECK(es.eigenvalues().minCoeff() > -1e-14);
  CHECK(rho.purity() <= 1.0 + 1e-12);

  // Photon vacuum factorizes: pure field state.
  const auto s1 = HilbertSpace::enumerate(1, {2, false, {}}, 1);
  const PhotonDensity vac = reduced_photon_density(singlet_state(*s1, 0, 1, 0), *s1);
  CHECK(vac.purity() == doctest::Approx(1.0));
}

TEST_CASE("amplitude, fidelity and atoms apart") {
  const auto s = HilbertSpace::enumerate(2, {2, true, {}}, 1);
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(s->dim()));
  const BasisState apart{{0, 0}, {{1, 0}, {0, 1}}};
  psi(static_cast<Eigen::Index>(s->index_of(apart))) = 1.0;
  CHECK(amplitude(psi, *s, apart) == cplx(1.0));
  CHECK(apart_probability(psi, *s) == 1.0);
  CHECK(fidelity(psi, psi) == doctest::Approx(1.0));
  CHECK_THROWS_AS(amplitude(psi, *s, BasisState{{1, 1}, {{0, 0}, {0, 0}}}), std::out_of_range);
}

TEST_CASE("spectrum rejects non-Hermitian matrices") {
  const auto s = HilbertSpace::enumerate(1, {1, false, {}}, 1);
  DenseMatrix m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(spectrum(OperatorMatrix(s, m)), NumericalError);
  m << 1.0, 2.0, 2.0, 1.0;
  const Eigen::VectorXd ev = spectrum(OperatorMatrix(s, m));
  CHECK(ev(0) == doctest::Approx(-1.0));
  CHECK(ev(1) == doctest::Approx(3.0));
}

TEST_CASE("spectral flow of a constant model is constant") {
  DrivenModel m;
  m.space = HilbertSpace::enumerate(1, {2, false, {}}, 1);
  m.params = ModelParams::zeros(1, 2);
  m.params.g_base << 1.0, 1.0;
  m.params.omega = 2.0;
  m.params.frame = Frame::lab;
  const std::vector<double> times{0.0, 0.5, 1.0};
  const SpectralFlow flow = spectral_flow(m, times);
  REQUIRE(flow.levels.size() == 3);
  CHECK((flow.levels[0] - flow.levels[2]).norm() == 0.0);
  CHECK(flow.levels[0](1) == doctest::Approx(2.0));  // the singlet sits at ω
  CHECK(flow.degenerate[0].size() == 2);
}

TEST_CASE("hump counting uses prominence") {
  std::vector<double> y;
  for (int i = 0; i <= 400; ++i) {
    const double t = i / 400.0;
    y.push_back(std::exp(-std::pow((t - 0.3) / 0.05, 2)) + 0.8 * std::exp(-std::pow((t - 0.7) / 0.05, 2)) +
                0.01 * std::sin(200.0 * t) + 0.02);
  }
  CHECK(count_humps(y, 0.0) == 2);
  CHECK(count_humps(y, 0.9) == 1);
  CHECK(count_humps(y, 0.0, 0.0) > 2);
  const std::vector<double> plateau{0.0, 1.0, 1.0, 0.0};
  CHECK(count_humps(plateau, 0.0) == 1);
  CHECK(count_humps(std::vector<double>{1.0, 2.0}, 0.0) == 0);
}

TEST_CASE("observable names") {
  const auto s = HilbertSpace::enumerate(1, {4, false, {}}, 2);
  const StateVector psi = random_state(static_cast<Eigen::Index>(s->dim()), 3);
  const auto obs = make_observables(
      {"P_free", "P_n[1]", "P_ph[2]", "pop[|0|1@0 1@0 0@0 0@0⟩]", "fidelity_init", "witness", "dark_overlap", "P_apart"}, s, psi);
  REQUIRE(obs.size() == 8);
  const Eigen::MatrixXd g = Eigen::MatrixXd::Ones(1, 4);
  const ObservationContext ctx{0.0, g, *s};
  CHECK(obs[0].fn(psi, ctx) == doctest::Approx(free_photon_probability(psi, *s)));
  CHECK(obs[4].fn(psi, ctx) == doctest::Approx(1.0));
  CHECK(obs[7].fn(psi, ctx) == 0.0);
  CHECK(obs[6].fn(psi, ctx) <= 1.0 + 1e-12);
  CHECK_THROWS_AS(make_observables({"P_lost"}, s, psi), std::invalid_argument);
  CHECK_THROWS_AS(make_observables({"P_ph[1 1]"}, s, psi), std::invalid_argument);
  CHECK_THROWS_AS(make_observables({"pop[nope]"}, s, psi), std::invalid_argument);
  const auto s2 = HilbertSpace::enumerate(1, {2, false, {}}, 1);
  CHECK_THROWS_AS(make_observables({"witness"}, s2, StateVector::Zero(3)), std::invalid_argument);
}
