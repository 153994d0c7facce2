#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pptaxis/grid_fields.hpp"
#include "pptaxis/linear_solvers.hpp"
#include "pptaxis/model_constants.hpp"

namespace pptaxis {

/// Predator density u, prey density v and the time they belong to.
struct State {
  State(Field u_, Field v_, double t_ = 0.0);

  Field u;
  Field v;
  double t = 0.0;

  const Grid& grid() const noexcept { return u.grid; }
};

State homogeneous_state(const Grid& g, double u, double v, double t = 0.0);

struct StepControl {
  double dt = 1e-3;
  double cfl_safety = 0.9;
  double max_time = 1.0;
  /// Sup-norm cap; beyond it (or on non-finite values) a run is classified
  /// as a numerical blow-up.
  double blowup_threshold = 1e9;
  DiffusionSolveOptions diffusion;
};

/// 1e6 * max(sigma^2, sigma).
double default_blowup_threshold(const DerivedConstants& dc);

/// Step rejected by the advective CFL restriction.
class CflViolation : public std::runtime_error {
 public:
  CflViolation(double dt, double admissible_dt);
  double dt() const noexcept { return dt_; }
  double admissible_dt() const noexcept { return admissible_; }

 private:
  double dt_;
  double admissible_;
};

/// Sup norm exceeded the configured cap or a value became non-finite.
class BlowUp : public std::runtime_error {
 public:
  explicit BlowUp(State snapshot);
  double time() const noexcept { return snapshot_.t; }
  const State& snapshot() const noexcept { return snapshot_; }

 private:
  State snapshot_;
};

/// Fixed-point iteration exceeded its cap or stopped contracting.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double residual, std::size_t iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

struct NormRecord {
  double t = 0.0;
  double sup_u = 0.0;
  double min_u = 0.0;
  double sup_v = 0.0;
  double min_v = 0.0;
  double l2_u = 0.0;
  double l2_v = 0.0;
  double c2proxy_u = 0.0;
  double c2proxy_v = 0.0;
  std::optional<std::size_t> picard_iters;
};

NormRecord measure(const State& s);

enum class Termination { completed, blowup, solver_failure };

std::string_view to_string(Termination t);

struct NormTrace {
  std::vector<NormRecord> records;
  Termination termination = Termination::completed;
  double termination_time = 0.0;
  std::string message;
  /// State at termination (blow-up snapshot included).
  std::optional<State> final_state;
};

/// Observers are called on every recorded state; record_stride counts steps
/// (IMEX) or slabs (Picard).
struct Observers {
  std::size_t record_stride = 1;
  std::function<void(const State&, const NormRecord&)> on_record;
  /// Called after every step/slab with the current state, before recording.
  std::function<void(const State&)> on_step;
};

/// Number of steps and the length of step k for a horizon split by dt.
struct StepSchedule {
  StepSchedule(double max_time, double dt);
  std::size_t steps = 0;
  double dt = 0.0;
  double max_time = 0.0;
  double time_after(std::size_t k) const;  // time after k steps
};

}  // namespace pptaxis
