#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tcdark/operators.hpp"
#include "tcdark/schedules.hpp"

namespace tcdark {

/// Thrown when a run violates a numerical contract (non-Hermitian H,
/// non-finite amplitudes, norm loss).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Backend { dense_spectral, krylov };
std::string to_string(Backend b);
Backend parse_backend(const std::string& name);

/// Where H is sampled inside each step: at its midpoint (default) or at its start.
enum class StepRule { midpoint, left };
std::string to_string(StepRule r);
StepRule parse_step_rule(const std::string& name);

/// Parameters plus time dependence: scheduled couplings and an optional
/// schedule scaling every atom-tunneling amplitude.
struct DrivenModel {
  SpacePtr space;
  ModelParams params;
  CouplingAssignment assignment;
  std::optional<Schedule> tunnel_schedule;

  Eigen::MatrixXd couplings(double t) const { return coupling_at(params, assignment, t); }
  double tunnel_scale(double t) const { return tunnel_schedule ? tunnel_schedule->evaluate(t) : 1.0; }
};

struct EvolutionConfig {
  double dt = 1e-3;
  double duration = 1.0;             // schedule length T
  std::optional<double> stop_time;   // simulate [0, stop_time]; defaults to T
  Backend backend = Backend::dense_spectral;
  int sample_every = 100;
  double cache_quantum = 0.0;        // 0 disables the propagator cache
  StepRule rule = StepRule::midpoint;
  bool keep_states = false;          // store the state at every sample

  void validate() const;
  double end_time() const { return stop_time.value_or(duration); }
  long step_count() const;
};

struct ObservationContext {
  double t;
  const Eigen::MatrixXd& g_now;
  const HilbertSpace& space;
};

using ObservableFn = std::function<double(const StateVector&, const ObservationContext&)>;

struct NamedObservable {
  std::string name;
  ObservableFn fn;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::vector<StateVector> states;  // only with keep_states
  StateVector final_state;
  double norm_drift = 0.0;           // max |‖ψ‖ - 1| over all steps
  double max_step_norm_change = 0.0;
  long steps = 0;

  bool has(const std::string& name) const;
  /// Throws std::out_of_range for unknown observables.
  const std::vector<double>& column(const std::string& name) const;
};

/// Lanczos approximation of exp(-i H dt) v, stopping when the a-posteriori
/// error estimate drops below `tol` or the Krylov space becomes invariant.
StateVector krylov_expmv(const OperatorMatrix& h, const StateVector& v, double dt, double tol = 1e-12,
                         int* iterations = nullptr);

/// exp(-i H dt) state. Throws NumericalError for non-Hermitian H, non-finite
/// or non-normalized input.
StateVector step(const StateVector& state, const OperatorMatrix& h, double dt,
                 Backend backend = Backend::dense_spectral);

/// Per-step propagation under H(t) rebuilt from the model, with an optional
/// cache of spectral decompositions keyed on quantized schedule values.
class Propagator {
 public:
  Propagator(const DrivenModel& model, Backend backend, double cache_quantum = 0.0);
  ~Propagator();
  Propagator(Propagator&&) noexcept;

  StateVector advance(const StateVector& psi, double t_eval, double dt);
  OperatorMatrix hamiltonian(double t) const;

  std::size_t cache_size() const;
  std::size_t cache_hits() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

TrajectoryRecord evolve(const StateVector& initial, const DrivenModel& model, const EvolutionConfig& config,
                        const std::vector<NamedObservable>& observers);

struct ConvergenceReport {
  double floor = 0.0;  // max over samples of ‖ψ_dt - ψ_dt/2‖
  std::vector<std::pair<std::string, double>> observable_floors;
  TrajectoryRecord coarse;
  TrajectoryRecord fine;
};

/// Runs dt and dt/2 concurrently and compares them at shared sample times.
ConvergenceReport convergence_check(const StateVector& initial, const DrivenModel& model,
                                    const EvolutionConfig& config, const std::vector<NamedObservable>& observers);

}  // namespace tcdark
