#include "pptaxis/solver_imex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pptaxis/kernels.hpp"

namespace pptaxis {

double admissible_taxis_dt(const Field& u, const Field& v, double chi_coeff, double xi_coeff,
                           double cfl_safety) {
  const double vel = std::max(max_face_velocity(v, chi_coeff), max_face_velocity(u, xi_coeff));
  if (!(vel > std::numeric_limits<double>::epsilon())) {
    return std::isnan(vel) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return cfl_safety * u.grid.min_spacing() / (2.0 * u.grid.dim() * vel);
}

namespace {

void check_blowup(const State& s, double threshold) {
  const double su = sup_norm(s.u);
  const double sv = sup_norm(s.v);
  if (!std::isfinite(su) || !std::isfinite(sv) || su > threshold || sv > threshold) throw BlowUp(s);
}

}  // namespace

State step_imex(const State& s, const ModelParams& p, const StepControl& ctl) {
  return step_imex(s, p, ctl, ctl.dt);
}

State step_imex(const State& s, const ModelParams& p, const StepControl& ctl, double dt) {
  const auto& k = kernels::active();
  const std::size_t n = s.u.size();

  const double admissible = admissible_taxis_dt(s.u, s.v, p.chi, p.xi, ctl.cfl_safety);
  if (dt > admissible * (1.0 + 1e-12)) throw CflViolation(dt, admissible);

  // taxis
  Field u1(s.grid()), v1(s.grid());
  if (p.chi != 0.0) {
    const Field div_u = div_flux_upwind(s.u, s.v, -p.chi);
    k.axpy(s.u.values.data(), div_u.values.data(), u1.values.data(), n, dt);
  } else {
    u1 = s.u;
  }
  if (p.xi != 0.0) {
    const Field div_v = div_flux_upwind(s.v, s.u, p.xi);
    k.axpy(s.v.values.data(), div_v.values.data(), v1.values.data(), n, dt);
  } else {
    v1 = s.v;
  }

  // reaction: u gains c1 v, loses a1 + b1 u; v gains a2, loses b2 v + u
  Field gain(s.grid()), loss(s.grid());
  Field u2(s.grid()), v2(s.grid());
  k.affine2(v1.values.data(), v1.values.data(), gain.values.data(), n, 0.0, p.c1, 0.0);
  k.affine2(u1.values.data(), u1.values.data(), loss.values.data(), n, p.a1, p.b1, 0.0);
  k.patankar(u1.values.data(), gain.values.data(), loss.values.data(), u2.values.data(), n, dt);
  std::fill(gain.values.begin(), gain.values.end(), p.a2);
  k.affine2(v1.values.data(), u1.values.data(), loss.values.data(), n, 0.0, p.b2, 1.0);
  k.patankar(v1.values.data(), gain.values.data(), loss.values.data(), v2.values.data(), n, dt);

  State next(solve_diffusion_implicit(u2, p.d1, dt, ctl.diffusion),
             solve_diffusion_implicit(v2, p.d2, dt, ctl.diffusion), s.t + dt);
  check_blowup(next, ctl.blowup_threshold);
  return next;
}

NormTrace run_imex(const State& s0, const ModelParams& p, const StepControl& ctl,
                   const Observers& observers) {
  NormTrace trace;
  const StepSchedule schedule(ctl.max_time, ctl.dt);
  const std::size_t stride = std::max<std::size_t>(1, observers.record_stride);
  State s = s0;
  const double t0 = s0.t;

  for (std::size_t step = 0; step < schedule.steps; ++step) {
    const double h = schedule.time_after(step + 1) - schedule.time_after(step);
    try {
      s = step_imex(s, p, ctl, h);
      s.t = t0 + schedule.time_after(step + 1);
    } catch (const BlowUp& b) {
      State snap = b.snapshot();
      snap.t = t0 + schedule.time_after(step + 1);
      trace.records.push_back(measure(snap));
      trace.termination = Termination::blowup;
      trace.termination_time = snap.t;
      trace.message = b.what();
      trace.final_state = std::move(snap);
      return trace;
    } catch (const std::runtime_error& e) {
      trace.termination = Termination::solver_failure;
      trace.termination_time = s.t;
      trace.message = e.what();
      trace.final_state = s;
      return trace;
    }
    if (observers.on_step) observers.on_step(s);
    if ((step + 1) % stride == 0 || step + 1 == schedule.steps) {
      trace.records.push_back(measure(s));
      if (observers.on_record) observers.on_record(s, trace.records.back());
    }
  }
  trace.termination = Termination::completed;
  trace.termination_time = s.t;
  trace.final_state = std::move(s);
  return trace;
}

}  // namespace pptaxis
