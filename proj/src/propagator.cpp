#include "tcdark/propagator.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Eigenvalues>

namespace tcdark {

std::string to_string(Backend b) { return b == Backend::krylov ? "krylov" : "dense_spectral"; }

Backend parse_backend(const std::string& name) {
  if (name == "dense_spectral" || name == "dense") return Backend::dense_spectral;
  if (name == "krylov") return Backend::krylov;
  throw std::invalid_argument("unknown backend '" + name + "' (expected dense_spectral or krylov)");
}

std::string to_string(StepRule r) { return r == StepRule::left ? "left" : "midpoint"; }

StepRule parse_step_rule(const std::string& name) {
  if (name == "midpoint") return StepRule::midpoint;
  if (name == "left") return StepRule::left;
  throw std::invalid_argument("unknown step rule '" + name + "' (expected midpoint or left)");
}

void EvolutionConfig::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw std::invalid_argument("evolution: duration must be positive");
  if (!(dt > 0.0) || dt > duration) throw std::invalid_argument("evolution: dt must satisfy 0 < dt <= T");
  if (stop_time && (!(*stop_time > 0.0) || *stop_time > duration))
    throw std::invalid_argument("evolution: stop time must lie in (0, T]");
  if (sample_every < 1) throw std::invalid_argument("evolution: sample_every must be >= 1");
  if (!(cache_quantum >= 0.0)) throw std::invalid_argument("evolution: cache_quantum must be >= 0");
}

long EvolutionConfig::step_count() const {
  return static_cast<long>(std::ceil(end_time() / dt - 1e-9));
}

bool TrajectoryRecord::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& TrajectoryRecord::column(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("trajectory has no observable '" + name + "'");
  return columns[static_cast<std::size_t>(it - names.begin())];
}

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kNormTol = 1e-9;

// Infinity-norm bound on ‖H‖₂ for Hermitian H.
double norm_bound(const OperatorMatrix& h) {
  if (auto d = h.dense_view()) return d->size() ? d->cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
  const auto& s = *h.sparse_view();
  double best = 0.0;
  for (Eigen::Index r = 0; r < s.outerSize(); ++r) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(s, r); it; ++it) row += std::abs(it.value());
    best = std::max(best, row);
  }
  return best;
}

bool is_real(const DenseMatrix& m) { return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0; }

// Eigendecomposition of a Hermitian matrix, real when possible.
struct Spectral {
  Eigen::VectorXd values;
  Eigen::MatrixXd real_vectors;
  Eigen::MatrixXcd complex_vectors;
  bool real = true;

  explicit Spectral(const DenseMatrix& h) : real(is_real(h)) {
    if (real) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
      if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
      values = es.eigenvalues();
      real_vectors = es.eigenvectors();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
      if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
      values = es.eigenvalues();
      complex_vectors = es.eigenvectors();
    }
  }

  StateVector propagate(const StateVector& psi, double dt) const {
    const Eigen::Index n = values.size();
    if (real) {
      const Eigen::VectorXd re = real_vectors.transpose() * psi.real();
      const Eigen::VectorXd im = real_vectors.transpose() * psi.imag();
      Eigen::VectorXd re2(n), im2(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        const double phase = -values(k) * dt;
        const double c = std::cos(phase), s = std::sin(phase);
        re2(k) = c * re(k) - s * im(k);
        im2(k) = s * re(k) + c * im(k);
      }
      StateVector out(n);
      out.real() = real_vectors * re2;
      out.imag() = real_vectors * im2;
      return out;
    }
    StateVector c = complex_vectors.adjoint() * psi;
    for (Eigen::Index k = 0; k < n; ++k) c(k) *= std::polar(1.0, -values(k) * dt);
    return complex_vectors * c;
  }
};

void require_hermitian(const OperatorMatrix& h) {
  const double r = hermiticity_residual(h);
  if (r > kHermitianTol) throw NumericalError("Hamiltonian is not Hermitian (relative residual " + std::to_string(r) + ")");
}

void require_state(const StateVector& psi, Eigen::Index dim) {
  if (psi.size() != dim) throw std::invalid_argument("state dimension does not match the operator");
  if (!psi.allFinite()) throw NumericalError("state has non-finite amplitudes");
  if (std::abs(psi.norm() - 1.0) > kNormTol) throw NumericalError("state is not normalized");
}

// exp(-i T dt) e1 for the real symmetric tridiagonal T = tridiag(beta, alpha, beta).
StateVector tridiagonal_exp_e1(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta, double dt) {
  const Eigen::Index m = alpha.size();
  // Eigen's implicit QR can stall on unscaled input spanning many decades.
  double scale = alpha.cwiseAbs().maxCoeff();
  if (m > 1) scale = std::max(scale, beta.head(m - 1).cwiseAbs().maxCoeff());
  if (scale == 0.0) scale = 1.0;
  const Eigen::VectorXd diag = alpha / scale;
  const Eigen::VectorXd sub = beta.head(std::max<Eigen::Index>(m - 1, 0)) / scale;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("Krylov tridiagonal eigensolver failed");
  const auto& q = es.eigenvectors();
  StateVector coeff(m);
  for (Eigen::Index k = 0; k < m; ++k) coeff(k) = q(0, k) * std::polar(1.0, -es.eigenvalues()(k) * scale * dt);
  return q.cast<cplx>() * coeff;
}

}  // namespace

StateVector krylov_expmv(const OperatorMatrix& h, const StateVector& v, double dt, double tol, int* iterations) {
  const Eigen::Index n = h.dim();
  const double beta0 = v.norm();
  if (beta0 == 0.0 || n == 0) return v;
  const double hnorm = norm_bound(h);
  const double breakdown = 64.0 * std::numeric_limits<double>::epsilon() * std::max(hnorm, 1e-300);

  DenseMatrix basis(n, std::min<Eigen::Index>(n, 32) + 1);
  Eigen::VectorXd alpha(n), beta(n);
  basis.col(0) = v / beta0;

  for (Eigen::Index j = 0; j < n; ++j) {
    if (basis.cols() < j + 2) basis.conservativeResize(Eigen::NoChange, std::min<Eigen::Index>(n + 1, 2 * basis.cols()));
    StateVector w = h.apply(basis.col(j));
    alpha(j) = basis.col(j).dot(w).real();
    w -= alpha(j) * basis.col(j);
    if (j > 0) w -= beta(j - 1) * basis.col(j - 1);
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass) {
      const StateVector overlap = basis.leftCols(j + 1).adjoint() * w;
      w -= basis.leftCols(j + 1) * overlap;
    }
    beta(j) = w.norm();
    const Eigen::Index m = j + 1;
    const bool invariant = beta(j) <= breakdown || m == n;
    const bool check = invariant || m <= 16 || m % 8 == 0;
    if (check) {
      const StateVector y = tridiagonal_exp_e1(alpha.head(m), beta.head(m), dt);
      const double err = beta(j) * std::abs(y(m - 1));
      if (invariant || err < tol) {
        if (iterations) *iterations = static_cast<int>(m);
        return beta0 * (basis.leftCols(m) * y);
      }
    }
    basis.col(j + 1) = w / beta(j);
  }
  throw NumericalError("Krylov iteration did not terminate");
}

StateVector step(const StateVector& state, const OperatorMatrix& h, double dt, Backend backend) {
  require_hermitian(h);
  require_state(state, h.dim());
  StateVector out = backend == Backend::krylov ? krylov_expmv(h, state, dt) : Spectral(h.dense()).propagate(state, dt);
  if (!out.allFinite()) throw NumericalError("propagation produced non-finite amplitudes");
  return out;
}

struct Propagator::Impl {
  DrivenModel model;
  HamiltonianTerms terms;
  Backend backend;
  double quantum;
  std::size_t hits = 0;
  static constexpr std::size_t kMaxCache = 1u << 16;

  struct KeyHash {
    std::size_t operator()(const std::vector<long long>& k) const {
      std::size_t h = 1469598103934665603ull;
      for (long long x : k) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
      return h;
    }
  };
  std::unordered_map<std::vector<long long>, Spectral, KeyHash> cache;

  Impl(const DrivenModel& m, Backend b, double q) : model(m), terms(m.space, m.params), backend(b), quantum(q) {}

  // Schedule multipliers at t, in assignment order followed by the tunnel scale.
  std::vector<double> multipliers(double t) const {
    std::vector<double> out;
    out.reserve(model.assignment.entries.size() + 1);
    for (const auto& e : model.assignment.entries) out.push_back(e.schedule.evaluate(t));
    out.push_back(model.tunnel_scale(t));
    return out;
  }

  OperatorMatrix hamiltonian_from(const std::vector<double>& mult) const {
    Eigen::MatrixXd g = model.params.g_base;
    for (std::size_t i = 0; i < model.assignment.entries.size(); ++i) {
      const auto& e = model.assignment.entries[i];
      g(e.cavity, e.atom) = model.params.g_base(e.cavity, e.atom) * mult[i];
    }
    return terms.assemble(g, mult.back());
  }
};

Propagator::Propagator(const DrivenModel& model, Backend backend, double cache_quantum)
    : impl_(std::make_unique<Impl>(model, backend, cache_quantum)) {
  require_hermitian(impl_->hamiltonian_from(impl_->multipliers(0.0)));
}

Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;

OperatorMatrix Propagator::hamiltonian(double t) const { return impl_->hamiltonian_from(impl_->multipliers(t)); }

std::size_t Propagator::cache_size() const { return impl_->cache.size(); }
std::size_t Propagator::cache_hits() const { return impl_->hits; }

StateVector Propagator::advance(const StateVector& psi, double t_eval, double dt) {
  auto& im = *impl_;
  auto mult = im.multipliers(t_eval);
  if (im.quantum > 0.0 && im.backend == Backend::dense_spectral) {
    std::vector<long long> key;
    key.reserve(mult.size());
    for (double& m : mult) {
      const long long q = std::llround(m / im.quantum);
      key.push_back(q);
      m = static_cast<double>(q) * im.quantum;
    }
    if (auto it = im.cache.find(key); it != im.cache.end()) {
      ++im.hits;
      return it->second.propagate(psi, dt);
    }
    Spectral spec(im.hamiltonian_from(mult).dense());
    StateVector out = spec.propagate(psi, dt);
    if (im.cache.size() < Impl::kMaxCache) im.cache.emplace(std::move(key), std::move(spec));
    return out;
  }
  const OperatorMatrix h = im.hamiltonian_from(mult);
  if (im.backend == Backend::krylov) return krylov_expmv(h, psi, dt);
  return Spectral(h.dense()).propagate(psi, dt);
}

TrajectoryRecord evolve(const StateVector& initial, const DrivenModel& model, const EvolutionConfig& config,
                        const std::vector<NamedObservable>& observers) {
  config.validate();
  model.params.validate(model.space->cavities(), model.space->atom_count());
  require_state(initial, static_cast<Eigen::Index>(model.space->dim()));

  TrajectoryRecord rec;
  for (const auto& o : observers) rec.names.push_back(o.name);
  rec.columns.resize(observers.size());

  const long steps = config.step_count();
  const double end = config.end_time();
  Propagator prop(model, config.backend, config.cache_quantum);

  auto sample = [&](const StateVector& psi, double t) {
    rec.times.push_back(t);
    const Eigen::MatrixXd g = model.couplings(t);
    const ObservationContext ctx{t, g, *model.space};
    for (std::size_t i = 0; i < observers.size(); ++i) rec.columns[i].push_back(observers[i].fn(psi, ctx));
    if (config.keep_states) rec.states.push_back(psi);
  };

  StateVector psi = initial;
  sample(psi, 0.0);
  double prev_norm = psi.norm();
  for (long k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) * config.dt;
    const double t1 = (k + 1 == steps) ? end : static_cast<double>(k + 1) * config.dt;
    const double h = t1 - t0;
    const double t_eval = config.rule == StepRule::midpoint ? t0 + 0.5 * h : t0;
    psi = prop.advance(psi, t_eval, h);
    if (!psi.allFinite()) throw NumericalError("non-finite amplitudes at t=" + std::to_string(t1));
    const double norm = psi.norm();
    rec.norm_drift = std::max(rec.norm_drift, std::abs(norm - 1.0));
    rec.max_step_norm_change = std::max(rec.max_step_norm_change, std::abs(norm - prev_norm));
    prev_norm = norm;
    if ((k + 1) % config.sample_every == 0 || k + 1 == steps) sample(psi, t1);
  }
  rec.final_state = psi;
  rec.steps = steps;
  return rec;
}

ConvergenceReport convergence_check(const StateVector& initial, const DrivenModel& model,
                                    const EvolutionConfig& config, const std::vector<NamedObservable>& observers) {
  EvolutionConfig coarse = config;
  coarse.keep_states = true;
  EvolutionConfig fine = coarse;
  fine.dt = 0.5 * config.dt;
  fine.sample_every = 2 * config.sample_every;

  auto fine_future = std::async(std::launch::async, [&] { return evolve(initial, model, fine, observers); });
  ConvergenceReport rep;
  rep.coarse = evolve(initial, model, coarse, observers);
  rep.fine = fine_future.get();

  if (rep.coarse.times.size() != rep.fine.times.size())
    throw std::logic_error("convergence_check: sample grids differ");
  for (std::size_t s = 0; s < rep.coarse.states.size(); ++s)
    rep.floor = std::max(rep.floor, (rep.coarse.states[s] - rep.fine.states[s]).norm());
  for (std::size_t i = 0; i < rep.coarse.names.size(); ++i) {
    double worst = 0.0;
    for (std::size_t s = 0; s < rep.coarse.times.size(); ++s)
      worst = std::max(worst, std::abs(rep.coarse.columns[i][s] - rep.fine.columns[i][s]));
    rep.observable_floors.emplace_back(rep.coarse.names[i], worst);
  }
  return rep;
}

}  // namespace tcdark
