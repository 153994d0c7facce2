#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pptaxis {

/// Thrown when model parameters or initial-data bounds fail validation.
class ModelError : public std::invalid_argument {
 public:
  ModelError(std::string field, const std::string& what)
      : std::invalid_argument(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Thrown when a derived constant overflows or is otherwise non-finite.
class DerivationError : public std::runtime_error {
 public:
  DerivationError(std::string field, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Coefficients of the predator (u) / prey (v) system
///
///   u_t = d1 Δu - chi ∇·(u ∇v) + u (-a1 - b1 u + c1 v)
///   v_t = d2 Δv + xi  ∇·(v ∇u) + v ( a2 - b2 v - u)
///
/// with homogeneous Neumann boundaries. chi and xi may be zero (taxis-free
/// runs) or above the admissible thresholds; admissibility is reported
/// separately by check_taxis_admissible().
struct ModelParams {
  double d1 = 1.0;
  double d2 = 1.0;
  double chi = 0.0;
  double xi = 0.0;
  double a1 = 0.0;
  double b1 = 1.0;
  double a2 = 0.0;
  double b2 = 1.0;
  double c1 = 0.0;

  /// Throws ModelError naming the first offending coefficient.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

/// User-supplied bounds for the C^{2+alpha} norms of the initial data.
struct InitialDataNorms {
  double norm_u0_c2alpha = 0.0;
  double norm_v0_c2alpha = 0.0;
  double alpha = 0.5;

  void validate() const;
};

struct DerivedConstants {
  double rho = 0.0;
  double sigma = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;
  double h4 = 0.0;
  /// Computable branch 3 rho / (sigma + sigma^3); an upper bound for the
  /// true smallness radius, whose other branches involve Schauder constants.
  double r_upper = 0.0;
  double chi_max = 0.0;
  double xi_max = 0.0;
  /// Placeholder for the Schauder-type constant. Reported, never used for gating.
  std::optional<double> schauder_p;
};

DerivedConstants derive_constants(const ModelParams& p, const InitialDataNorms& n,
                                  std::optional<double> schauder_p = std::nullopt);

inline double reaction_u(double u, double v, const ModelParams& p) {
  return u * (-p.a1 - p.b1 * u + p.c1 * v);
}

inline double reaction_v(double u, double v, const ModelParams& p) {
  return v * (p.a2 - p.b2 * v - u);
}

struct Equilibrium {
  double u = 0.0;
  double v = 0.0;
};

/// Positive homogeneous steady state, if one exists (requires c1 a2 > a1 b2).
std::optional<Equilibrium> coexistence_equilibrium(const ModelParams& p);

struct AdmissibilityReport {
  static constexpr std::string_view label = "upper-bound admissibility";
  bool chi_ok = false;
  bool xi_ok = false;
  double chi_margin = 0.0;  // chi_max - chi
  double xi_margin = 0.0;   // xi_max - xi
};

AdmissibilityReport check_taxis_admissible(const ModelParams& p, const DerivedConstants& dc);

}  // namespace pptaxis
