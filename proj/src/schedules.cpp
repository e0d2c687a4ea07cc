#include "tcdark/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tcdark {

namespace {

// Slack for t landing a rounding error outside [0, T] after accumulation.
constexpr double kTimeSlack = 1e-12;

}  // namespace

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::gaussian_bump: return "gaussian_bump";
    case ScheduleKind::cosine: return "cosine";
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::position: return "position";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "gaussian_bump") return ScheduleKind::gaussian_bump;
  if (name == "cosine") return ScheduleKind::cosine;
  if (name == "constant") return ScheduleKind::constant;
  if (name == "position") return ScheduleKind::position;
  throw std::invalid_argument("unknown schedule kind '" + name + "' (expected gaussian_bump, cosine, constant, position)");
}

Schedule Schedule::gaussian_bump(double duration, double speedup) {
  Schedule s;
  s.kind = ScheduleKind::gaussian_bump;
  s.duration = duration;
  s.speedup = speedup;
  s.validate();
  return s;
}

Schedule Schedule::cosine(double duration) {
  Schedule s;
  s.kind = ScheduleKind::cosine;
  s.duration = duration;
  s.validate();
  return s;
}

Schedule Schedule::constant(double duration) {
  Schedule s;
  s.duration = duration;
  s.validate();
  return s;
}

Schedule Schedule::position(double duration, double length, double x_start, double x_end) {
  Schedule s;
  s.kind = ScheduleKind::position;
  s.duration = duration;
  s.length = length;
  s.x_start = x_start;
  s.x_end = x_end;
  s.validate();
  return s;
}

void Schedule::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw std::invalid_argument("schedule: duration must be positive");
  if (!(speedup > 0.0) || !std::isfinite(speedup)) throw std::invalid_argument("schedule: speedup must be positive");
  if (kind == ScheduleKind::position) {
    if (!(length > 0.0)) throw std::invalid_argument("schedule: cavity length must be positive");
    if (x_start < 0.0 || x_start > length || x_end < 0.0 || x_end > length)
      throw std::invalid_argument("schedule: position path must stay inside [0, L]");
  }
}

double Schedule::evaluate(double t) const {
  const double T = duration;
  if (!(t >= -kTimeSlack * T && t <= T * (1.0 + kTimeSlack)))
    throw std::domain_error("schedule: t=" + std::to_string(t) + " outside [0, " + std::to_string(T) + "]");
  t = std::clamp(t, 0.0, T);
  switch (kind) {
    case ScheduleKind::gaussian_bump: {
      const double u = (t <= 0.5 * T) ? t : (T - t);
      const double z = 5.0 * speedup * u / T;
      return std::exp(-z * z);
    }
    case ScheduleKind::cosine:
      return 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * t / T));
    case ScheduleKind::constant:
      return 1.0;
    case ScheduleKind::position: {
      const double x = x_start + (x_end - x_start) * (t / T);
      return std::sin(std::numbers::pi * x / length);
    }
  }
  return 1.0;
}

void CouplingAssignment::add(int cavity, int atom, const Schedule& schedule) {
  for (const auto& e : entries)
    if (e.cavity == cavity && e.atom == atom)
      throw std::invalid_argument("coupling assignment: duplicate (cavity " + std::to_string(cavity) + ", atom " +
                                  std::to_string(atom) + ")");
  schedule.validate();
  entries.push_back({cavity, atom, schedule});
}

Eigen::MatrixXd coupling_at(const ModelParams& params, const CouplingAssignment& assignment, double t) {
  Eigen::MatrixXd g = params.g_base;
  for (const auto& e : assignment.entries) {
    if (e.cavity < 0 || e.cavity >= g.rows() || e.atom < 0 || e.atom >= g.cols())
      throw std::out_of_range("coupling assignment: (cavity, atom) outside the coupling table");
    g(e.cavity, e.atom) = params.g_base(e.cavity, e.atom) * e.schedule.evaluate(t);
  }
  return g;
}

}  // namespace tcdark
