#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tcdark/observables.hpp"
#include "tcdark/propagator.hpp"

namespace tcdark {

enum class ExperimentKind { trajectory, spectrum };
std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

/// Which amplitude the schedule modulates: the couplings of the driven atoms,
/// or every atom-tunneling amplitude.
enum class DriveTarget { coupling, tunneling };
std::string to_string(DriveTarget target);
DriveTarget parse_drive_target(const std::string& name);

/// A named scenario. Every field has a flat config key (see config.hpp).
struct ExperimentSpec {
  std::string name;
  std::string alias;
  std::string description;
  ExperimentKind kind = ExperimentKind::trajectory;

  // model
  int cavities = 1;
  int atoms = 2;
  bool mobile = false;
  std::vector<int> home;                    // fixed atoms; empty = all in cavity 0
  std::vector<std::pair<int, int>> edges;   // hopping/tunneling bridges; empty = chain
  int sector = 1;
  std::optional<int> cutoff;

  // params, in rad/s
  double omega = 0.0;
  double g = 0.0;
  double mu_ph = 0.0;
  double mu_at = 0.0;
  Frame frame = Frame::rotating;

  // drive
  Schedule schedule;
  DriveTarget target = DriveTarget::coupling;
  std::vector<int> driven_atoms;

  // initial state: one singlet per pair, superposed over cavities with the given weights
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> cavity_weights{1.0};

  EvolutionConfig run;
  std::vector<std::string> observables;
  int spectrum_points = 201;

  void validate() const;
};

class UnknownExperiment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<ExperimentSpec>& builtin_experiments();
/// Lookup by name or alias; throws UnknownExperiment listing the registry.
ExperimentSpec find_experiment(const std::string& name);

SpacePtr build_space(const ExperimentSpec& spec);
DrivenModel build_model(const ExperimentSpec& spec);
/// Normalized initial state, singlets deformed to the couplings at t = 0.
StateVector build_initial(const ExperimentSpec& spec, const DrivenModel& model);

struct ExperimentRun {
  ExperimentSpec spec;
  TrajectoryRecord record;
  double seconds = 0.0;
};

ExperimentRun run_experiment(const ExperimentSpec& spec);
ConvergenceReport converge_experiment(const ExperimentSpec& spec);
/// Levels of H(t) on spectrum_points equally spaced times over [0, end].
SpectralFlow spectrum_experiment(const ExperimentSpec& spec);

/// Runs trajectory experiments concurrently, at most `workers` at a time;
/// results keep the input order.
std::vector<ExperimentRun> run_experiments(std::span<const ExperimentSpec> specs, int workers);

struct RunComparison {
  double max_a = 0.0;
  double max_b = 0.0;
  double ratio = 0.0;     // max_a / max_b
  double distance = 0.0;  // sup |a - b| on a's time grid
};

/// b is linearly interpolated onto a's times inside the shared window.
/// Throws std::invalid_argument when either run lacks the observable or the
/// windows do not overlap.
RunComparison compare_runs(const TrajectoryRecord& a, const TrajectoryRecord& b, const std::string& observable);

/// "%.12e" formatting shared by every CSV writer.
std::string format_number(double x);
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);
/// Columns t, level[0..n-1], degenerate[0..n-2].
void write_spectrum_csv(std::ostream& os, const SpectralFlow& flow);
/// Every config entry of the spec, then run statistics.
void write_manifest(std::ostream& os, const ExperimentSpec& spec, const TrajectoryRecord* record,
                    const ConvergenceReport* convergence, double seconds);

}  // namespace tcdark
