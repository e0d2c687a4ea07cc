#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tcdark/operators.hpp"

namespace tcdark {

enum class ScheduleKind { gaussian_bump, cosine, constant, position };

std::string to_string(ScheduleKind kind);
/// Throws std::invalid_argument for unknown names.
ScheduleKind parse_schedule_kind(const std::string& name);

/// Dimensionless coupling multiplier G(t) on [0, duration].
///
///   gaussian_bump  exp(-(5 s t/T)^2) for t <= T/2, mirrored about T/2 after
///   cosine         (1 + cos(2πt/T)) / 2
///   constant       1
///   position       sin(π x(t)/L), x moving linearly from x_start to x_end
///
/// `speedup` (s) narrows the Gaussian while keeping T, so fast and slow runs
/// share a time axis.
struct Schedule {
  ScheduleKind kind = ScheduleKind::constant;
  double duration = 1.0;
  double speedup = 1.0;
  double length = 1.0;
  double x_start = 0.5;
  double x_end = 0.5;

  static Schedule gaussian_bump(double duration, double speedup = 1.0);
  static Schedule cosine(double duration);
  static Schedule constant(double duration);
  static Schedule position(double duration, double length, double x_start, double x_end);

  /// Throws std::domain_error for t outside [0, duration].
  double evaluate(double t) const;
  void validate() const;
};

/// Couplings driven by schedules; unlisted (cavity, atom) pairs stay at g_base.
struct CouplingAssignment {
  struct Entry {
    int cavity = 0;
    int atom = 0;
    Schedule schedule;
  };
  std::vector<Entry> entries;

  /// Throws std::invalid_argument on a duplicate (cavity, atom) pair.
  void add(int cavity, int atom, const Schedule& schedule);
};

/// g_now[i][k] = g_base[i][k] * G_ik(t).
Eigen::MatrixXd coupling_at(const ModelParams& params, const CouplingAssignment& assignment, double t);

}  // namespace tcdark
