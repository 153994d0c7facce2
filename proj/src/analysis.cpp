#include "pptaxis/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pptaxis/solver_imex.hpp"

namespace pptaxis {

Field supersolution_residual_v(const Field& u, const ModelParams& p, const DerivedConstants& dc) {
  const double R = dc.r_upper, s = dc.sigma;
  const Field lap = laplacian_neumann(u);
  Field r(u.grid);
  for (std::size_t k = 0; k < u.size(); ++k)
    r[k] = ((s * p.xi / R) * lap[k] + p.a2 - (s / R) * u[k] - s * p.b2) * R;
  return r;
}

Field supersolution_residual_u(const Field& v, const ModelParams& p, const DerivedConstants& dc) {
  const double R = dc.r_upper, s = dc.sigma;
  const Field lap = laplacian_neumann(v);
  Field r(v.grid);
  for (std::size_t k = 0; k < v.size(); ++k)
    r[k] = (-(s * p.chi / R) * lap[k] - p.a1 + (s * p.c1 / R) * v[k] - s * s * p.b1) * s * R;
  return r;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::violated: return "violated";
    case Verdict::blowup: return "blowup";
  }
  return "unknown";
}

BoundReport bound_monitor(const NormTrace& trace, const DerivedConstants& dc, const BoundMonitorOptions& opts) {
  const double inf = std::numeric_limits<double>::infinity();
  BoundCheck min_u{"min_u >= 0", -opts.min_tolerance, inf, std::nullopt};
  BoundCheck min_v{"min_v >= 0", -opts.min_tolerance, inf, std::nullopt};
  BoundCheck sup_u{"sup_u <= sigma^2", dc.sigma * dc.sigma * (1.0 + opts.slack), 0.0, std::nullopt};
  BoundCheck sup_v{"sup_v <= sigma", dc.sigma * (1.0 + opts.slack), 0.0, std::nullopt};
  BoundCheck c2{"c2proxy_u + c2proxy_v <= horizon", opts.c2_horizon.value_or(inf), 0.0, std::nullopt, false};

  auto lower = [](BoundCheck& b, double value, double t) {
    b.observed = std::min(b.observed, value);
    if (!(value >= b.bound) && !b.first_violation) b.first_violation = t;
  };
  auto upper = [](BoundCheck& b, double value, double t) {
    b.observed = std::max(b.observed, value);
    if (!(value <= b.bound) && !b.first_violation) b.first_violation = t;
  };
  for (const NormRecord& r : trace.records) {
    lower(min_u, r.min_u, r.t);
    lower(min_v, r.min_v, r.t);
    upper(sup_u, r.sup_u, r.t);
    upper(sup_v, r.sup_v, r.t);
    upper(c2, r.c2proxy_u + r.c2proxy_v, r.t);
  }
  if (trace.records.empty()) {
    min_u.observed = min_v.observed = 0.0;
  }

  BoundReport rep;
  rep.bounds_checked = {min_u, min_v, sup_u, sup_v, c2};
  if (trace.termination == Termination::blowup) {
    rep.verdict = Verdict::blowup;
    return rep;
  }
  rep.verdict = Verdict::pass;
  for (const BoundCheck& b : rep.bounds_checked)
    if (b.asserted && b.first_violation) rep.verdict = Verdict::violated;
  return rep;
}

double energy_distance(const State& a, const State& b) {
  require_same_grid(a.u, b.u);
  require_same_grid(a.v, b.v);
  double s = 0.0;
  for (std::size_t k = 0; k < a.u.size(); ++k) {
    const double w = a.u[k] - b.u[k];
    const double z = a.v[k] - b.v[k];
    s += w * w + z * z;
  }
  return s * a.grid().cell_volume();
}

GrowthFit fit_log_growth(std::span<const double> times, std::span<const double> energies) {
  if (times.size() != energies.size() || times.size() < 2)
    throw std::invalid_argument("growth fit needs at least two (t, E) samples");
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double n = static_cast<double>(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(energies[k] > 0)) throw std::invalid_argument("growth fit needs positive energies");
    const double y = std::log(energies[k]);
    st += times[k];
    sy += y;
    stt += times[k] * times[k];
    sty += times[k] * y;
  }
  const double denom = n * stt - st * st;
  if (!(denom > 0)) throw std::invalid_argument("growth fit needs distinct times");
  GrowthFit fit;
  fit.lambda = (n * sty - st * sy) / denom;
  fit.log_e0 = (sy - fit.lambda * st) / n;
  return fit;
}

double max_log_second_difference_rate(std::span<const double> times, std::span<const double> energies) {
  if (times.size() != energies.size()) throw std::invalid_argument("times/energies size mismatch");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < times.size(); ++k) {
    const double tau = times[k + 1] - times[k];
    const double d2 = std::log(energies[k + 1]) - 2.0 * std::log(energies[k]) + std::log(energies[k - 1]);
    worst = std::max(worst, d2 / tau);
  }
  return worst;
}

std::pair<Field, Field> twin_perturbation(const Grid& g) {
  const double lx = g.extent(0);
  const double ly = g.dim() == 2 ? g.extent(1) : 1.0;
  const bool two_d = g.dim() == 2;
  constexpr double pi = std::numbers::pi;
  Field eu = sample(g, [&](double x, double y) {
    return std::cos(pi * x / lx) * (two_d ? std::cos(pi * y / ly) : 1.0);
  });
  Field ev = sample(g, [&](double x, double) { return std::cos(2.0 * pi * x / lx); });
  return {std::move(eu), std::move(ev)};
}

GrowthReport gronwall_twin_test(const State& s0, double delta, const ModelParams& p,
                                const DerivedConstants& dc, const PicardControl& ctl,
                                const TwinTestOptions& opts) {
  if (!(delta >= 0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be >= 0");
  GrowthReport rep;
  rep.delta = delta;
  rep.gradient_coefficient = -dc.rho / 2.0 + dc.sigma * dc.r_upper / 6.0 +
                             dc.sigma * dc.sigma * dc.sigma * dc.r_upper / 6.0;

  State twin = s0;
  if (delta > 0) {
    const auto [eu, ev] = twin_perturbation(s0.grid());
    for (std::size_t k = 0; k < twin.u.size(); ++k) {
      twin.u[k] = std::max(0.0, twin.u[k] + delta * eu[k]);
      twin.v[k] = std::max(0.0, twin.v[k] + delta * ev[k]);
    }
  }

  std::vector<State> base_states, twin_states;
  auto run = [&](const State& start, std::vector<State>& out) {
    Observers obs;
    obs.record_stride = opts.record_stride;
    obs.on_record = [&out](const State& s, const NormRecord&) { out.push_back(s); };
    return opts.solver == SolverChoice::imex ? run_imex(start, p, ctl.step, obs)
                                             : run_picard(start, p, dc, ctl, obs);
  };
  const NormTrace ta = run(s0, base_states);
  const NormTrace tb = run(twin, twin_states);
  if (ta.termination != Termination::completed || tb.termination != Termination::completed) {
    rep.inconclusive = true;
    rep.note = "run did not complete: " + std::string(to_string(ta.termination)) + "/" +
               std::string(to_string(tb.termination));
    return rep;
  }

  rep.times.push_back(s0.t);
  rep.energies.push_back(energy_distance(s0, twin));
  rep.identical = s0.u.values == twin.u.values && s0.v.values == twin.v.values;
  for (std::size_t k = 0; k < base_states.size() && k < twin_states.size(); ++k) {
    rep.times.push_back(base_states[k].t);
    rep.energies.push_back(energy_distance(base_states[k], twin_states[k]));
    rep.identical = rep.identical && base_states[k].u.values == twin_states[k].u.values &&
                    base_states[k].v.values == twin_states[k].v.values;
  }

  const bool all_positive = std::all_of(rep.energies.begin(), rep.energies.end(), [](double e) { return e > 0; });
  if (!all_positive) {
    rep.note = rep.identical ? "zero separation; growth rate undefined" : "separation vanished at some record";
    rep.envelope_ok = rep.identical;
    rep.superexponential_free = rep.identical;
    return rep;
  }
  const GrowthFit fit = fit_log_growth(rep.times, rep.energies);
  rep.lambda = fit.lambda;
  rep.envelope_ok = true;
  const double e0 = rep.energies.front(), t0 = rep.times.front();
  for (std::size_t k = 0; k < rep.times.size(); ++k)
    if (rep.energies[k] > e0 * std::exp(fit.lambda * (rep.times[k] - t0)) * (1.0 + opts.envelope_slack))
      rep.envelope_ok = false;
  rep.max_second_diff_rate = max_log_second_difference_rate(rep.times, rep.energies);
  rep.superexponential_free = rep.max_second_diff_rate <= opts.second_diff_tolerance;
  return rep;
}

double convergence_order(std::span<const std::pair<double, double>> h_and_error) {
  if (h_and_error.size() < 3) throw std::invalid_argument("convergence_order needs at least 3 entries");
  const double ratio = h_and_error[0].first / h_and_error[1].first;
  if (!(ratio > 1)) throw std::invalid_argument("h must be strictly decreasing");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < h_and_error.size(); ++k) {
    const auto [h, err] = h_and_error[k];
    if (!(h > 0)) throw std::invalid_argument("h must be positive");
    if (!(err > 0)) throw std::invalid_argument("convergence_order needs positive errors");
    if (k > 0) {
      const double r = h_and_error[k - 1].first / h;
      if (std::fabs(r - ratio) > 1e-9 * ratio) throw std::invalid_argument("h must shrink by a constant factor");
    }
    const double x = std::log(h), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(h_and_error.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Field random_admissible_field(const Grid& g, double sup_cap, double c2_cap, std::mt19937_64& rng, int modes) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> fill(0.2, 1.0);
  constexpr double pi = std::numbers::pi;
  const double lx = g.extent(0);
  const double ly = g.dim() == 2 ? g.extent(1) : 1.0;
  const int modes_y = g.dim() == 2 ? modes : 1;

  std::vector<double> a(static_cast<std::size_t>(modes * modes_y));
  for (int kx = 0; kx < modes; ++kx)
    for (int ky = 0; ky < modes_y; ++ky) a[kx * modes_y + ky] = coef(rng) / (1.0 + kx * kx + ky * ky);

  Field f = sample(g, [&](double x, double y) {
    double s = 0.0;
    for (int kx = 0; kx < modes; ++kx)
      for (int ky = 0; ky < modes_y; ++ky)
        s += a[kx * modes_y + ky] * std::cos(kx * pi * x / lx) * std::cos(ky * pi * y / ly);
    return s;
  });
  const double lo = min_value(f);
  for (double& x : f.values) x -= lo;
  const double sup = sup_norm(f);
  const double c2 = c2_norm_proxy(f);
  if (!(sup > 0) || !(c2 > 0)) return f;
  const double scale = std::min(sup_cap / sup, c2_cap / c2) * fill(rng);
  for (double& x : f.values) x *= scale;
  return f;
}

}  // namespace pptaxis
