#include <doctest.h>

#include <cmath>
#include <random>

#include "tcdark/propagator.hpp"

using namespace tcdark;

namespace {

DrivenModel jc_model(double g) {
  DrivenModel m;
  m.space = HilbertSpace::enumerate(1, {1, false, {}}, 1);
  m.params = ModelParams::zeros(1, 1);
  m.params.g_base(0, 0) = g;
  return m;
}

StateVector excited_atom(const HilbertSpace& s) {
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(s.dim()));
  psi(static_cast<Eigen::Index>(s.index_of({{0}, {{1, 0}}}))) = 1.0;
  return psi;
}

NamedObservable photon_population() {
  return {"P_photon", [](const StateVector& psi, const ObservationContext& c) {
            return std::norm(psi(static_cast<Eigen::Index>(c.space.index_of({{1}, {{0, 0}}}))));
          }};
}

OperatorMatrix random_hermitian(SpacePtr s, std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(s->dim());
  DenseMatrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
  return OperatorMatrix(s, DenseMatrix((a + a.adjoint()) / 2.0));
}

}  // namespace

TEST_CASE("Rabi oscillation matches sin^2(gt)") {
  const double g = 2.0, period = M_PI / g;
  for (auto backend : {Backend::dense_spectral, Backend::krylov}) {
    const auto model = jc_model(g);
    EvolutionConfig cfg;
    cfg.duration = period;
    cfg.dt = period / 1000.0;
    cfg.sample_every = 1;
    cfg.backend = backend;
    const auto rec = evolve(excited_atom(*model.space), model, cfg, {photon_population()});
    double worst = 0.0;
    for (std::size_t i = 0; i < rec.times.size(); ++i)
      worst = std::max(worst, std::abs(rec.columns[0][i] - std::pow(std::sin(g * rec.times[i]), 2)));
    CHECK(worst < 1e-8);
    CHECK(rec.times.size() == 1001);
    CHECK(rec.times.back() == doctest::Approx(period));
    CHECK(rec.norm_drift < 1e-12);
  }
}

TEST_CASE("sampling grid includes both ends") {
  const auto model = jc_model(1.0);
  EvolutionConfig cfg;
  cfg.duration = 1.0;
  cfg.dt = 0.03;
  cfg.sample_every = 10;
  const auto rec = evolve(excited_atom(*model.space), model, cfg, {photon_population()});
  CHECK(rec.steps == 34);
  CHECK(rec.times.front() == 0.0);
  CHECK(rec.times.back() == doctest::Approx(1.0));
  CHECK(rec.times.size() == 5);
  cfg.stop_time = 0.5;
  CHECK(evolve(excited_atom(*model.space), model, cfg, {}).times.back() == doctest::Approx(0.5));
}

TEST_CASE("Krylov agrees with dense exponentiation") {
  std::mt19937 rng(5);
  const auto s = HilbertSpace::enumerate(1, {5, false, {}}, 2);
  const auto h = random_hermitian(s, rng);
  StateVector v = StateVector::Random(h.dim());
  v.normalize();
  for (double dt : {1e-3, 0.1, 1.0, 5.0}) {
    int it = 0;
    const StateVector a = krylov_expmv(h, v, dt, 1e-12, &it);
    const StateVector b = step(v, h, dt, Backend::dense_spectral);
    CHECK((a - b).norm() < 1e-10);
    CHECK(it <= h.dim());
  }
}

TEST_CASE("Krylov handles strongly graded tridiagonals") {
  // A nearly invariant start vector gives Lanczos coefficients spanning many decades.
  std::mt19937 rng(9);
  const auto s = HilbertSpace::enumerate(1, {5, false, {}}, 2);
  OperatorMatrix h = random_hermitian(s, rng) * cplx(1e8);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h.dense());
  StateVector v = es.eigenvectors().col(0) + 1e-9 * es.eigenvectors().col(3);
  v.normalize();
  const StateVector a = krylov_expmv(h, v, 0.01);
  const StateVector b = step(v, h, 0.01, Backend::dense_spectral);
  CHECK((a - b).norm() < 1e-6);
}

TEST_CASE("step rejects invalid input") {
  const auto s = HilbertSpace::enumerate(1, {1, false, {}}, 1);
  DenseMatrix m(2, 2);
  m << 0.0, 1.0, 2.0, 0.0;
  StateVector psi(2);
  psi << 1.0, 0.0;
  CHECK_THROWS_AS(step(psi, OperatorMatrix(s, m), 0.1), NumericalError);
  const OperatorMatrix ok(s, DenseMatrix(DenseMatrix::Identity(2, 2)));
  CHECK_THROWS_AS(step(psi * 2.0, ok, 0.1), NumericalError);
  psi(1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(step(psi, ok, 0.1), NumericalError);
}

TEST_CASE("constant Hamiltonian has no discretization floor") {
  const auto model = jc_model(3.0);
  EvolutionConfig cfg;
  cfg.duration = 2.0;
  cfg.dt = 0.01;
  cfg.sample_every = 10;
  const auto report = convergence_check(excited_atom(*model.space), model, cfg, {photon_population()});
  CHECK(report.floor < 1e-12);
  REQUIRE(report.observable_floors.size() == 1);
  CHECK(report.observable_floors[0].second < 1e-12);
}

TEST_CASE("midpoint floor shrinks quadratically, left-point linearly") {
  DrivenModel model;
  model.space = HilbertSpace::enumerate(1, {2, false, {}}, 1);
  model.params = ModelParams::zeros(1, 2);
  model.params.g_base << 1.0, 1.0;
  model.assignment.add(0, 1, Schedule::gaussian_bump(20.0));
  StateVector psi = StateVector::Zero(3);
  psi(static_cast<Eigen::Index>(model.space->index_of({{0}, {{1, 0}, {0, 0}}}))) = 1.0;
  auto floor_at = [&](double dt, StepRule rule) {
    EvolutionConfig cfg;
    cfg.duration = 20.0;
    cfg.dt = dt;
    cfg.rule = rule;
    cfg.sample_every = 5;
    return convergence_check(psi, model, cfg, {}).floor;
  };
  const double m1 = floor_at(0.04, StepRule::midpoint), m2 = floor_at(0.02, StepRule::midpoint);
  CHECK(m1 / m2 == doctest::Approx(4.0).epsilon(0.1));
  const double l1 = floor_at(0.04, StepRule::left), l2 = floor_at(0.02, StepRule::left);
  CHECK(l1 / l2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("propagator cache reuses decompositions") {
  auto model = jc_model(1.0);
  model.assignment.add(0, 0, Schedule::constant(1.0));
  Propagator p(model, Backend::dense_spectral, 1e-6);
  StateVector psi = excited_atom(*model.space);
  for (int k = 0; k < 10; ++k) psi = p.advance(psi, 0.05 + 0.1 * k, 0.1);
  CHECK(p.cache_size() == 1);
  CHECK(p.cache_hits() == 9);
  CHECK(std::norm(psi(1)) == doctest::Approx(std::pow(std::sin(1.0), 2)).epsilon(1e-10));
}

TEST_CASE("configuration validation") {
  EvolutionConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS(cfg.validate());
  cfg.dt = 0.1;
  cfg.stop_time = 2.0;
  CHECK_THROWS(cfg.validate());
  cfg.stop_time.reset();
  cfg.sample_every = 0;
  CHECK_THROWS(cfg.validate());
  CHECK(parse_backend("krylov") == Backend::krylov);
  CHECK_THROWS(parse_backend("rk4"));
  CHECK(parse_step_rule(to_string(StepRule::left)) == StepRule::left);
}
