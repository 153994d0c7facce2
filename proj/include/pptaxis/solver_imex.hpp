#pragma once

#include "pptaxis/state.hpp"

namespace pptaxis {

/// Largest dt for which explicit donor-cell taxis keeps both densities
/// non-negative: cfl_safety * h_min / (2 * dim * max face velocity).
/// Infinite when both taxis velocities vanish.
double admissible_taxis_dt(const Field& u, const Field& v, double chi_coeff, double xi_coeff,
                           double cfl_safety);

/// One Lie-split step of length dt:
///   1. explicit upwind taxis (-chi for u along grad v, +xi for v along grad u),
///   2. reaction with explicit gains and Patankar-implicit losses,
///   3. implicit diffusion per component.
/// Throws CflViolation, BlowUp, or SolverError.
State step_imex(const State& s, const ModelParams& p, const StepControl& ctl);

/// Same step with an explicit step length (used for the last, shortened step).
State step_imex(const State& s, const ModelParams& p, const StepControl& ctl, double dt);

/// Steps until max_time or the first failure. Never throws for solver
/// failures; the termination field of the trace records them.
NormTrace run_imex(const State& s0, const ModelParams& p, const StepControl& ctl,
                   const Observers& observers = {});

}  // namespace pptaxis
