#pragma once

// Checkable inequalities around the model: constant super-solution
// residuals, a priori bound monitoring, the twin-run energy (Gronwall) test
// and grid-convergence estimation.

#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pptaxis/solver_picard.hpp"
#include "pptaxis/state.hpp"

namespace pptaxis {

/// Pointwise residual of the constant v^ = R in the frozen-u linear problem:
/// ((sigma xi/R) Δ_h u + a2 - (sigma/R) u - sigma b2) R.
/// Non-positive whenever xi <= R/3, 0 <= u <= sigma R and the C2 proxy of u is at most rho.
Field supersolution_residual_v(const Field& u, const ModelParams& p, const DerivedConstants& dc);

/// Pointwise residual of the constant u^ = sigma R in the frozen-v linear problem:
/// (-(sigma chi/R) Δ_h v - a1 + (sigma c1/R) v - sigma^2 b1) sigma R.
Field supersolution_residual_u(const Field& v, const ModelParams& p, const DerivedConstants& dc);

enum class Verdict { pass, violated, blowup };
std::string_view to_string(Verdict v);

struct BoundCheck {
  std::string name;
  double bound = 0.0;
  /// Worst observed value: the minimum for lower bounds, the maximum otherwise.
  double observed = 0.0;
  std::optional<double> first_violation;
  /// False for bounds that are only reported (the C2 horizon).
  bool asserted = true;
};

struct BoundReport {
  std::vector<BoundCheck> bounds_checked;
  Verdict verdict = Verdict::pass;
};

struct BoundMonitorOptions {
  double slack = 0.05;
  double min_tolerance = 1e-12;
  std::optional<double> c2_horizon;
};

/// Checks min u, min v >= -tol, sup u <= sigma^2 (1+slack), sup v <= sigma (1+slack).
BoundReport bound_monitor(const NormTrace& trace, const DerivedConstants& dc,
                          const BoundMonitorOptions& opts = {});

/// Volume-weighted integral of (u1-u2)^2 + (v1-v2)^2.
double energy_distance(const State& a, const State& b);

struct GrowthFit {
  double lambda = 0.0;
  double log_e0 = 0.0;
};

/// Least-squares fit of log E(t) = log_e0 + lambda t. Requires >= 2 points, E > 0.
GrowthFit fit_log_growth(std::span<const double> times, std::span<const double> energies);

/// Largest second difference of log E divided by the record spacing.
/// Assumes uniformly spaced samples.
double max_log_second_difference_rate(std::span<const double> times, std::span<const double> energies);

enum class SolverChoice { imex, picard };

struct GrowthReport {
  bool inconclusive = false;
  std::string note;
  double delta = 0.0;
  std::vector<double> times;
  std::vector<double> energies;
  bool identical = false;  // both runs bitwise equal at every record
  std::optional<double> lambda;
  bool envelope_ok = false;
  double max_second_diff_rate = 0.0;
  bool superexponential_free = false;
  /// -rho/2 + sigma R/6 + sigma^3 R/6 at R = r_upper; reported, not asserted.
  double gradient_coefficient = 0.0;
};

struct TwinTestOptions {
  SolverChoice solver = SolverChoice::imex;
  std::size_t record_stride = 1;
  double envelope_slack = 0.1;
  double second_diff_tolerance = 1e-3;  // per unit time
};

/// Smooth Neumann-compatible perturbation directions for u and v.
std::pair<Field, Field> twin_perturbation(const Grid& g);

/// Runs the chosen solver from s0 and from s0 + delta * perturbation and
/// tracks the energy distance between the two trajectories.
GrowthReport gronwall_twin_test(const State& s0, double delta, const ModelParams& p,
                                const DerivedConstants& dc, const PicardControl& ctl,
                                const TwinTestOptions& opts = {});

/// Least-squares slope of log(error) against log(h). Requires >= 3 entries
/// with positive errors and h decreasing by a constant factor.
double convergence_order(std::span<const std::pair<double, double>> h_and_error);

/// Truncated cosine series (Neumann-compatible), shifted to be non-negative
/// and rescaled so that sup <= sup_cap and c2_norm_proxy <= c2_cap.
Field random_admissible_field(const Grid& g, double sup_cap, double c2_cap, std::mt19937_64& rng,
                              int modes = 4);

}  // namespace pptaxis
