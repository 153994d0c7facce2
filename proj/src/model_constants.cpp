#include "pptaxis/model_constants.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

namespace pptaxis {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ModelError(field, std::string(field) + ": " + what);
}

void require_finite(double value, const char* field) {
  if (!std::isfinite(value))
    throw DerivationError(field, std::string("non-finite derived constant: ") + field);
}

}  // namespace

void ModelParams::validate() const {
  const std::initializer_list<std::pair<const char*, double>> all = {
      {"d1", d1}, {"d2", d2}, {"chi", chi}, {"xi", xi}, {"a1", a1},
      {"b1", b1}, {"a2", a2}, {"b2", b2}, {"c1", c1}};
  for (const auto& [name, value] : all) require(std::isfinite(value), name, "must be finite");
  require(d1 > 0, "d1", "must be > 0");
  require(d2 > 0, "d2", "must be > 0");
  require(b1 > 0, "b1", "must be > 0");
  require(b2 > 0, "b2", "must be > 0");
  require(chi >= 0, "chi", "must be >= 0");
  require(xi >= 0, "xi", "must be >= 0");
  require(a1 >= 0, "a1", "must be >= 0");
  require(a2 >= 0, "a2", "must be >= 0");
  require(c1 >= 0, "c1", "must be >= 0");
}

void InitialDataNorms::validate() const {
  require(std::isfinite(norm_u0_c2alpha) && norm_u0_c2alpha >= 0, "norm_u0_c2alpha",
          "must be finite and >= 0");
  require(std::isfinite(norm_v0_c2alpha) && norm_v0_c2alpha >= 0, "norm_v0_c2alpha",
          "must be finite and >= 0");
  require(alpha > 0 && alpha < 1, "alpha", "must lie strictly inside (0,1)");
}

DerivedConstants derive_constants(const ModelParams& p, const InitialDataNorms& n,
                                  std::optional<double> schauder_p) {
  p.validate();
  n.validate();
  if (schauder_p && !(*schauder_p > 0 && std::isfinite(*schauder_p)))
    throw ModelError("schauder_p", "schauder_p: must be a positive finite number");

  DerivedConstants dc;
  dc.rho = std::min({p.d1, p.d2, p.b1, p.b2});
  dc.sigma = std::max({p.d1, p.d2, p.b1, p.b2, p.a1, 3.0 * p.a2 / dc.rho, 3.0 * p.c1 / dc.rho,
                       std::sqrt(n.norm_u0_c2alpha), n.norm_v0_c2alpha});
  require_finite(dc.sigma, "sigma");

  const double s = dc.sigma;
  const double r = dc.rho;
  dc.h1 = s * (1.0 + r + 2.0 * s);
  dc.h2 = s * (1.0 + r);
  dc.h3 = s * (1.0 + r * s + s * s);
  dc.h4 = s * (1.0 + r * s);
  require_finite(dc.h1, "h1");
  require_finite(dc.h3, "h3");

  dc.r_upper = 3.0 * r / (s + s * s * s);
  require_finite(dc.r_upper, "r_upper");
  if (!(dc.r_upper > 0)) throw DerivationError("r_upper", "r_upper underflowed to zero");
  dc.xi_max = dc.r_upper / 3.0;
  dc.chi_max = s * dc.r_upper / 3.0;
  dc.schauder_p = schauder_p;
  return dc;
}

std::optional<Equilibrium> coexistence_equilibrium(const ModelParams& p) {
  if (p.c1 <= 0) return std::nullopt;
  const double numerator = p.c1 * p.a2 - p.a1 * p.b2;
  if (!(numerator > 0)) return std::nullopt;
  Equilibrium eq;
  eq.u = numerator / (p.c1 + p.b1 * p.b2);
  eq.v = (p.a1 + p.b1 * eq.u) / p.c1;
  return eq;
}

AdmissibilityReport check_taxis_admissible(const ModelParams& p, const DerivedConstants& dc) {
  AdmissibilityReport rep;
  rep.chi_margin = dc.chi_max - p.chi;
  rep.xi_margin = dc.xi_max - p.xi;
  rep.chi_ok = p.chi > 0 && p.chi <= dc.chi_max;
  rep.xi_ok = p.xi > 0 && p.xi <= dc.xi_max;
  return rep;
}

}  // namespace pptaxis
