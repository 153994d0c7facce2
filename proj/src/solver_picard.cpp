#include "pptaxis/solver_picard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pptaxis/kernels.hpp"
#include "pptaxis/solver_imex.hpp"

namespace pptaxis {

ScaledState::ScaledState(Field u_hat_, Field v_hat_, double t_)
    : u_hat(std::move(u_hat_)), v_hat(std::move(v_hat_)), t(t_) {
  require_same_grid(u_hat, v_hat);
}

namespace {

double hat_factor(const DerivedConstants& dc) {
  if (!(dc.r_upper > 0) || !(dc.sigma > 0)) throw std::invalid_argument("scaling requires r_upper > 0");
  return dc.r_upper / dc.sigma;
}

Field scaled(const Field& f, double factor, bool inverse) {
  Field out(f.grid);
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = inverse ? f[k] / factor : f[k] * factor;
  return out;
}

void check_trajectory_shape(const Trajectory& a, const Trajectory& b, std::span<const double> dts) {
  if (a.size() != dts.size() + 1 || b.size() != dts.size() + 1)
    throw std::invalid_argument("trajectory levels do not match slab steps");
}

void check_finite(const Field& f, const Field& partner, bool f_is_u, double threshold_hat,
                  const DerivedConstants& dc, double t) {
  const double s = sup_norm(f);
  if (std::isfinite(s) && s <= threshold_hat) return;
  const double factor = hat_factor(dc);
  Field fu = scaled(f, factor, true), fp = scaled(partner, factor, true);
  throw BlowUp(f_is_u ? State(std::move(fu), std::move(fp), t) : State(std::move(fp), std::move(fu), t));
}

// One linear step: explicit frozen taxis on `x`, linear Patankar reaction, implicit diffusion.
Field linear_step(const Field& x, const Field& potential, double taxis_coeff, const Field& gain,
                  const Field& loss, double diffusivity, double dt, const StepControl& sc) {
  const auto& k = kernels::active();
  const std::size_t n = x.size();
  if (taxis_coeff != 0.0) {
    const double vel = max_face_velocity(potential, taxis_coeff);
    const double admissible = std::isfinite(vel) && vel > std::numeric_limits<double>::epsilon()
                                  ? sc.cfl_safety * x.grid.min_spacing() / (2.0 * x.grid.dim() * vel)
                                  : (std::isfinite(vel) ? std::numeric_limits<double>::infinity() : 0.0);
    if (dt > admissible * (1.0 + 1e-12)) throw CflViolation(dt, admissible);
  }
  Field y(x.grid);
  if (taxis_coeff != 0.0) {
    const Field div = div_flux_upwind(x, potential, taxis_coeff);
    k.axpy(x.values.data(), div.values.data(), y.values.data(), n, dt);
  } else {
    y = x;
  }
  Field z(x.grid);
  k.patankar(y.values.data(), gain.values.data(), loss.values.data(), z.values.data(), n, dt);
  return solve_diffusion_implicit(z, diffusivity, dt, sc.diffusion);
}

}  // namespace

ScaledState scale_to_hat(const State& s, const DerivedConstants& dc) {
  const double f = hat_factor(dc);
  return ScaledState(scaled(s.u, f, false), scaled(s.v, f, false), s.t);
}

State scale_from_hat(const ScaledState& s, const DerivedConstants& dc) {
  const double f = hat_factor(dc);
  return State(scaled(s.u_hat, f, true), scaled(s.v_hat, f, true), s.t);
}

Trajectory solve_linear_v(const Trajectory& u_frozen, const Trajectory& v_coeff, const Field& v_init,
                          const ModelParams& p, const DerivedConstants& dc, const PicardControl& ctl,
                          std::span<const double> dts) {
  check_trajectory_shape(u_frozen, v_coeff, dts);
  const auto& k = kernels::active();
  const double s_over_r = dc.sigma / dc.r_upper;
  const double threshold_hat = ctl.step.blowup_threshold * hat_factor(dc);
  const std::size_t n = v_init.size();

  Trajectory out;
  out.reserve(dts.size() + 1);
  out.push_back(v_init);
  Field gain(v_init.grid, p.a2), loss(v_init.grid);
  double t = 0.0;
  for (std::size_t l = 0; l < dts.size(); ++l) {
    const Field& uf = u_frozen[l + 1];
    k.affine2(uf.values.data(), v_coeff[l + 1].values.data(), loss.values.data(), n, 0.0, s_over_r,
              s_over_r * p.b2);
    out.push_back(linear_step(out.back(), uf, s_over_r * p.xi, gain, loss, p.d2, dts[l], ctl.step));
    t += dts[l];
    check_finite(out.back(), uf, false, threshold_hat, dc, t);
  }
  return out;
}

Trajectory solve_linear_u(const Trajectory& v_frozen, const Trajectory& u_coeff, const Field& u_init,
                          const ModelParams& p, const DerivedConstants& dc, const PicardControl& ctl,
                          std::span<const double> dts) {
  check_trajectory_shape(v_frozen, u_coeff, dts);
  const auto& k = kernels::active();
  const double s_over_r = dc.sigma / dc.r_upper;
  const double threshold_hat = ctl.step.blowup_threshold * hat_factor(dc);
  const std::size_t n = u_init.size();

  Trajectory out;
  out.reserve(dts.size() + 1);
  out.push_back(u_init);
  Field gain(u_init.grid), loss(u_init.grid);
  double t = 0.0;
  for (std::size_t l = 0; l < dts.size(); ++l) {
    const Field& vf = v_frozen[l + 1];
    k.affine2(vf.values.data(), vf.values.data(), gain.values.data(), n, 0.0, s_over_r * p.c1, 0.0);
    k.affine2(u_coeff[l + 1].values.data(), u_coeff[l + 1].values.data(), loss.values.data(), n, p.a1,
              s_over_r * p.b1, 0.0);
    out.push_back(linear_step(out.back(), vf, -s_over_r * p.chi, gain, loss, p.d1, dts[l], ctl.step));
    t += dts[l];
    check_finite(out.back(), vf, true, threshold_hat, dc, t);
  }
  return out;
}

SlabResult picard_slab(const ScaledState& s, const ModelParams& p, const DerivedConstants& dc,
                       const PicardControl& ctl) {
  const std::vector<double> dts(std::max<std::size_t>(1, ctl.slab_steps), ctl.step.dt);
  return picard_slab(s, p, dc, ctl, dts);
}

SlabResult picard_slab(const ScaledState& s, const ModelParams& p, const DerivedConstants& dc,
                       const PicardControl& ctl, std::span<const double> dts) {
  if (!(ctl.fp_tol > 0)) throw std::invalid_argument("fp_tol must be positive");
  if (ctl.fp_max_iter < 1) throw std::invalid_argument("fp_max_iter must be >= 1");
  const auto& k = kernels::active();
  const std::size_t levels = dts.size() + 1;
  const std::size_t n = s.u_hat.size();

  // initial guess: slab initial data held constant over the slab
  Trajectory u_iter(levels, s.u_hat);
  Trajectory v_iter(levels, s.v_hat);
  SlabResult result{ScaledState(s.u_hat, s.v_hat, s.t), 0, 0.0, {}};

  for (std::size_t it = 1; it <= ctl.fp_max_iter; ++it) {
    Trajectory v_next = solve_linear_v(u_iter, v_iter, s.v_hat, p, dc, ctl, dts);
    Trajectory u_next = solve_linear_u(v_next, u_iter, s.u_hat, p, dc, ctl, dts);

    double residual = 0.0, scale = 0.0;
    for (std::size_t l = 1; l < levels; ++l) {
      residual = std::max({residual,
                           k.max_abs_diff(u_next[l].values.data(), u_iter[l].values.data(), n),
                           k.max_abs_diff(v_next[l].values.data(), v_iter[l].values.data(), n)});
      scale = std::max({scale, sup_norm(u_next[l]), sup_norm(v_next[l])});
    }
    // iterates are compared in physical units, not hat units
    const double to_physical = dc.sigma / dc.r_upper;
    residual *= to_physical;
    scale *= to_physical;
    if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    u_iter = std::move(u_next);
    v_iter = std::move(v_next);
    result.residual_history.push_back(residual);
    result.residual = residual;
    result.iterations = it;

    if (residual < ctl.fp_tol || residual <= floor) {
      double elapsed = 0.0;
      for (double h : dts) elapsed += h;
      result.end = ScaledState(u_iter.back(), v_iter.back(), s.t + elapsed);
      return result;
    }
    // past the second iterate the residual must not grow above round-off
    const auto& hist = result.residual_history;
    if (it >= 3 && residual > hist[hist.size() - 2] && residual > floor) {
      std::ostringstream os;
      os.precision(17);
      os << "Picard residual increased at iteration " << it << ": " << hist[hist.size() - 2] << " -> " << residual;
      throw NonConvergence(os.str(), residual, it);
    }
  }
  std::ostringstream os;
  os.precision(17);
  os << "Picard iteration did not converge in " << ctl.fp_max_iter << " iterations; residual " << result.residual;
  throw NonConvergence(os.str(), result.residual, result.iterations);
}

NormTrace run_picard(const State& s0, const ModelParams& p, const DerivedConstants& dc,
                     const PicardControl& ctl, const Observers& observers) {
  NormTrace trace;
  const StepSchedule schedule(ctl.step.max_time, ctl.step.dt);
  const std::size_t slab_steps = std::max<std::size_t>(1, ctl.slab_steps);
  const std::size_t stride = std::max<std::size_t>(1, observers.record_stride);
  const double t0 = s0.t;
  const double sup_cap = ctl.step.blowup_threshold;

  ScaledState hat = scale_to_hat(s0, dc);
  State current = s0;
  std::size_t max_iters = 0;
  std::size_t slab = 0;
  for (std::size_t first = 0; first < schedule.steps; first += slab_steps, ++slab) {
    const std::size_t last = std::min(schedule.steps, first + slab_steps);
    std::vector<double> dts;
    for (std::size_t st = first; st < last; ++st) dts.push_back(schedule.time_after(st + 1) - schedule.time_after(st));
    try {
      SlabResult r = picard_slab(hat, p, dc, ctl, dts);
      hat = std::move(r.end);
      hat.t = t0 + schedule.time_after(last);
      max_iters = std::max(max_iters, r.iterations);
      current = scale_from_hat(hat, dc);
      const double su = sup_norm(current.u), sv = sup_norm(current.v);
      if (!std::isfinite(su) || !std::isfinite(sv) || su > sup_cap || sv > sup_cap) throw BlowUp(current);
    } catch (const BlowUp& b) {
      State snap = b.snapshot();
      snap.t = t0 + schedule.time_after(last);
      trace.records.push_back(measure(snap));
      trace.records.back().picard_iters = max_iters;
      trace.termination = Termination::blowup;
      trace.termination_time = snap.t;
      trace.message = b.what();
      trace.final_state = std::move(snap);
      return trace;
    } catch (const std::runtime_error& e) {
      trace.termination = Termination::solver_failure;
      trace.termination_time = current.t;
      trace.message = e.what();
      trace.final_state = current;
      return trace;
    }
    if (observers.on_step) observers.on_step(current);
    if ((slab + 1) % stride == 0 || last == schedule.steps) {
      trace.records.push_back(measure(current));
      trace.records.back().picard_iters = max_iters;
      max_iters = 0;
      if (observers.on_record) observers.on_record(current, trace.records.back());
    }
  }
  trace.termination = Termination::completed;
  trace.termination_time = current.t;
  trace.final_state = std::move(current);
  return trace;
}

}  // namespace pptaxis
