#include "pptaxis/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pptaxis {

State::State(Field u_, Field v_, double t_) : u(std::move(u_)), v(std::move(v_)), t(t_) {
  require_same_grid(u, v);
}

State homogeneous_state(const Grid& g, double u, double v, double t) {
  return State(Field(g, u), Field(g, v), t);
}

double default_blowup_threshold(const DerivedConstants& dc) {
  return 1e6 * std::max(dc.sigma * dc.sigma, dc.sigma);
}

namespace {

std::string cfl_message(double dt, double admissible) {
  std::ostringstream os;
  os.precision(17);
  os << "CFL violation: dt=" << dt << " exceeds admissible dt=" << admissible;
  return os.str();
}

std::string blowup_message(double t) {
  std::ostringstream os;
  os.precision(17);
  os << "numerical blow-up at t=" << t;
  return os.str();
}

}  // namespace

CflViolation::CflViolation(double dt, double admissible_dt)
    : std::runtime_error(cfl_message(dt, admissible_dt)), dt_(dt), admissible_(admissible_dt) {}

BlowUp::BlowUp(State snapshot)
    : std::runtime_error(blowup_message(snapshot.t)), snapshot_(std::move(snapshot)) {}

NormRecord measure(const State& s) {
  NormRecord r;
  r.t = s.t;
  r.sup_u = sup_norm(s.u);
  r.min_u = min_value(s.u);
  r.sup_v = sup_norm(s.v);
  r.min_v = min_value(s.v);
  r.l2_u = l2_norm(s.u);
  r.l2_v = l2_norm(s.v);
  r.c2proxy_u = c2_norm_proxy(s.u);
  r.c2proxy_v = c2_norm_proxy(s.v);
  return r;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::blowup: return "blowup";
    case Termination::solver_failure: return "solver_failure";
  }
  return "unknown";
}

StepSchedule::StepSchedule(double max_time_, double dt_) : dt(dt_), max_time(max_time_) {
  if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(max_time >= 0) || !std::isfinite(max_time)) throw std::invalid_argument("max_time must be >= 0");
  const double ratio = max_time / dt;
  const double rounded = std::round(ratio);
  // horizons within round-off of a multiple of dt take exactly that many steps
  steps = static_cast<std::size_t>(std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio) ? rounded
                                                                                             : std::ceil(ratio));
}

double StepSchedule::time_after(std::size_t k) const {
  if (k >= steps) return max_time;
  return static_cast<double>(k) * dt;
}

}  // namespace pptaxis
