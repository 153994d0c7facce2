#pragma once

// Decoupled integrator built on the fixed-point map (u, v) -> (u~, v~).
//
// The system is integrated in the scaled variables u^ = (R/sigma) u,
// v^ = (R/sigma) v, with R the computable radius r_upper. On each time slab
// the two frozen-coefficient linear problems
//
//   v~_t = d2 Δv~ + (sigma xi/R) div(v~ grad u) + (a2 - (sigma/R) u - (sigma b2/R) v_lag) v~
//   u~_t = d1 Δu~ - (sigma chi/R) div(u~ grad v) + (-a1 + (sigma c1/R) v - (sigma b1/R) u_lag) u~
//
// are solved alternately (v first, then u against the fresh v) until two
// successive slab trajectories agree to fp_tol (sup norm, physical units). Each linear
// step uses the same donor-cell taxis, Patankar reaction and implicit
// diffusion as the IMEX stepper, with the frozen coefficients taken at the
// new time level.

#include <span>
#include <vector>

#include "pptaxis/state.hpp"

namespace pptaxis {

struct PicardControl {
  StepControl step;
  std::size_t slab_steps = 1;
  double fp_tol = 1e-10;
  std::size_t fp_max_iter = 50;
};

struct ScaledState {
  ScaledState(Field u_hat_, Field v_hat_, double t_ = 0.0);

  Field u_hat;
  Field v_hat;
  double t = 0.0;
};

/// Fields at the slab's time levels 0..m; level 0 is the slab's initial data.
using Trajectory = std::vector<Field>;

ScaledState scale_to_hat(const State& s, const DerivedConstants& dc);
State scale_from_hat(const ScaledState& s, const DerivedConstants& dc);

/// `dts` holds the m step lengths of the slab; trajectories have m+1 levels.
Trajectory solve_linear_v(const Trajectory& u_frozen, const Trajectory& v_coeff, const Field& v_init,
                          const ModelParams& p, const DerivedConstants& dc, const PicardControl& ctl,
                          std::span<const double> dts);

Trajectory solve_linear_u(const Trajectory& v_frozen, const Trajectory& u_coeff, const Field& u_init,
                          const ModelParams& p, const DerivedConstants& dc, const PicardControl& ctl,
                          std::span<const double> dts);

struct SlabResult {
  ScaledState end;
  std::size_t iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

/// One slab of slab_steps steps of length ctl.step.dt.
SlabResult picard_slab(const ScaledState& s, const ModelParams& p, const DerivedConstants& dc,
                       const PicardControl& ctl);

SlabResult picard_slab(const ScaledState& s, const ModelParams& p, const DerivedConstants& dc,
                       const PicardControl& ctl, std::span<const double> dts);

/// Records carry the largest Picard iteration count since the previous record.
NormTrace run_picard(const State& s0, const ModelParams& p, const DerivedConstants& dc,
                     const PicardControl& ctl, const Observers& observers = {});

}  // namespace pptaxis
