#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pptaxis/analysis.hpp"
#include "pptaxis/linear_solvers.hpp"
#include "pptaxis/solver_imex.hpp"
#include "pptaxis/solver_picard.hpp"

using namespace pptaxis;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams classic() {
  ModelParams p;
  p.d1 = p.d2 = 1;
  p.a1 = 1;
  p.b1 = 1;
  p.a2 = 3;
  p.b2 = 1;
  p.c1 = 2;
  p.chi = 1e-3;
  p.xi = 1e-3;
  return p;
}

DerivedConstants constants_for(const ModelParams& p, const State& s) {
  return derive_constants(p, InitialDataNorms{c2alpha_norm_proxy(s.u, 0.5), c2alpha_norm_proxy(s.v, 0.5), 0.5});
}

double sup_diff(const Field& a, const Field& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_SUITE("linear_solvers") {

TEST_CASE("Thomas solve against a dense check") {
  const std::vector<double> lo = {0, -1, -2, 0.5}, di = {4, 5, 6, 3}, up = {1, 1, -1, 0}, rhs = {1, 2, 3, 4};
  std::vector<double> x(4);
  solve_tridiagonal(lo, di, up, rhs, x);
  for (std::size_t i = 0; i < 4; ++i) {
    double r = di[i] * x[i];
    if (i > 0) r += lo[i] * x[i - 1];
    if (i < 3) r += up[i] * x[i + 1];
    CHECK(r == doctest::Approx(rhs[i]).epsilon(1e-14));
  }
}

TEST_CASE("implicit diffusion keeps constants") {
  for (const Grid& g : {Grid::line(1.0, 33), Grid::rect(1.0, 1.0, 12, 9)}) {
    const Field out = solve_diffusion_implicit(Field(g, 2.5), 0.9, 0.3);
    for (double x : out.values) CHECK(x == doctest::Approx(2.5).epsilon(1e-12));
  }
}

TEST_CASE("implicit diffusion eigen-mode in 1D and 2D") {
  const double d = 0.6, dt = 0.02;
  {
    const Grid g = Grid::line(1.0, 128);
    const double h = g.spacing(0);
    const Field f = sample(g, [](double x, double) { return std::cos(kPi * x); });
    const double lam = 2 * (1 - std::cos(kPi * h)) / (h * h);
    const Field out = solve_diffusion_implicit(f, d, dt);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::fabs(out[i] - f[i] / (1 + dt * d * lam)) < 1e-9);
  }
  {
    const Grid g = Grid::rect(1.0, 1.0, 40, 40);
    const double h = g.spacing(0);
    const Field f = sample(g, [](double x, double y) { return std::cos(2 * kPi * x) * std::cos(kPi * y); });
    const double lam = 2 * (1 - std::cos(2 * kPi * h)) / (h * h) + 2 * (1 - std::cos(kPi * h)) / (h * h);
    const Field out = solve_diffusion_implicit(f, d, dt);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(std::fabs(out[k] - f[k] / (1 + dt * d * lam)) < 1e-9);
  }
}

TEST_CASE("implicit diffusion preserves non-negativity and mass") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Grid g = k % 2 ? Grid::rect(1.0, 1.0, 16, 16) : Grid::line(1.0, 64);
    Field f = random_admissible_field(g, 1.0, 1e3, rng, 8);
    const Field out = solve_diffusion_implicit(f, 1.0, 0.05);
    CHECK(min_value(out) >= -1e-13);
    CHECK(integral(out) == doctest::Approx(integral(f)).epsilon(1e-9));
  }
}

TEST_CASE("CG iteration cap raises SolverError") {
  const Grid g = Grid::rect(1.0, 1.0, 30, 30);
  const Field f = sample(g, [](double x, double y) { return x * x + std::sin(5 * y); });
  DiffusionSolveOptions opts;
  opts.rel_tol = 1e-14;
  opts.max_iter = 2;
  CHECK_THROWS_AS(solve_diffusion_implicit(f, 1.0, 1.0, opts), SolverError);
}

}  // TEST_SUITE

TEST_SUITE("solver_imex") {

TEST_CASE("equilibrium is a fixed point of the step") {
  const Grid g = Grid::line(1.0, 64);
  const State s = homogeneous_state(g, 5.0 / 3.0, 4.0 / 3.0);
  StepControl ctl;
  ctl.dt = 0.01;
  const State next = step_imex(s, classic(), ctl);
  CHECK(sup_diff(next.u, s.u) <= 1e-12);
  CHECK(sup_diff(next.v, s.v) <= 1e-12);
  CHECK(next.t == doctest::Approx(0.01));
}

TEST_CASE("zero state stays zero") {
  const State s = homogeneous_state(Grid::rect(1.0, 1.0, 8, 8), 0.0, 0.0);
  StepControl ctl;
  const State next = step_imex(s, classic(), ctl);
  CHECK(sup_norm(next.u) == 0.0);
  CHECK(sup_norm(next.v) == 0.0);
}

TEST_CASE("logistic prey without predators") {
  ModelParams p = classic();
  p.a2 = 1;
  p.b2 = 1;
  p.chi = p.xi = 0;
  const Grid g = Grid::line(1.0, 16);
  StepControl ctl;
  ctl.max_time = 5;
  double err_coarse = 0, err_fine = 0;
  for (double dt : {0.02, 0.01}) {
    ctl.dt = dt;
    const NormTrace tr = run_imex(homogeneous_state(g, 0.0, 0.5), p, ctl);
    REQUIRE(tr.termination == Termination::completed);
    const double exact = 1.0 / (1.0 + std::exp(-5.0));
    (dt == 0.02 ? err_coarse : err_fine) = std::fabs(tr.final_state->v[3] - exact);
  }
  CHECK(err_fine < 0.01);
  CHECK(err_coarse / err_fine == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("CFL violation reports the admissible step") {
  const Grid g = Grid::line(1.0, 32);
  ModelParams p = classic();
  p.chi = 50.0;
  const State s(Field(g, 1.0), sample(g, [](double x, double) { return 1 + std::cos(kPi * x); }));
  StepControl ctl;
  ctl.dt = 0.1;
  try {
    step_imex(s, p, ctl);
    FAIL("expected CflViolation");
  } catch (const CflViolation& e) {
    CHECK(e.admissible_dt() < 0.1);
    CHECK(e.admissible_dt() == doctest::Approx(admissible_taxis_dt(s.u, s.v, p.chi, p.xi, ctl.cfl_safety)));
    // the reported step is accepted
    CHECK_NOTHROW(step_imex(s, p, ctl, e.admissible_dt()));
  }
}

TEST_CASE("blow-up carries the snapshot") {
  const Grid g = Grid::line(1.0, 16);
  StepControl ctl;
  ctl.blowup_threshold = 1.0;
  try {
    step_imex(homogeneous_state(g, 5.0, 1.0), classic(), ctl);
    FAIL("expected BlowUp");
  } catch (const BlowUp& b) {
    CHECK(sup_norm(b.snapshot().u) > 1.0);
  }
  const NormTrace tr = run_imex(homogeneous_state(g, 5.0, 1.0), classic(), ctl);
  CHECK(tr.termination == Termination::blowup);
  CHECK(tr.termination_time == doctest::Approx(ctl.dt));
  CHECK(tr.records.size() == 1);
}

TEST_CASE("run bookkeeping") {
  const Grid g = Grid::line(1.0, 16);
  StepControl ctl;
  ctl.max_time = 0;
  NormTrace tr = run_imex(homogeneous_state(g, 1, 1), classic(), ctl);
  CHECK(tr.records.empty());
  CHECK(tr.termination == Termination::completed);

  ctl.max_time = 0.1;
  ctl.dt = 0.01;
  Observers obs;
  obs.record_stride = 3;
  int steps = 0, records = 0;
  obs.on_step = [&](const State&) { ++steps; };
  obs.on_record = [&](const State&, const NormRecord&) { ++records; };
  tr = run_imex(homogeneous_state(g, 1, 1), classic(), ctl, obs);
  CHECK(steps == 10);
  CHECK(records == 4);  // steps 3, 6, 9 and the final one
  CHECK(tr.records.back().t == doctest::Approx(0.1));
  CHECK_FALSE(tr.records.back().picard_iters.has_value());

  // equilibrium start over T=10: flat trace
  ctl.max_time = 10;
  obs = {};
  obs.record_stride = 100;
  tr = run_imex(homogeneous_state(g, 5.0 / 3.0, 4.0 / 3.0), classic(), ctl, obs);
  for (const NormRecord& r : tr.records) {
    CHECK(std::fabs(r.sup_u - 5.0 / 3.0) < 1e-10);
    CHECK(std::fabs(r.sup_v - 4.0 / 3.0) < 1e-10);
  }
}

TEST_CASE("step schedule") {
  const StepSchedule a(1.0, 0.1);
  CHECK(a.steps == 10);
  CHECK(a.time_after(10) == 1.0);
  const StepSchedule b(1.0, 0.3);
  CHECK(b.steps == 4);
  CHECK(b.time_after(4) == 1.0);
  CHECK(b.time_after(3) == doctest::Approx(0.9));
}

TEST_CASE("positivity over random admissible steps") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 30; ++k) {
    const Grid g = k % 3 ? Grid::line(1.0, 40) : Grid::rect(1.0, 1.0, 10, 12);
    State s(random_admissible_field(g, 2.0, 40.0, rng), random_admissible_field(g, 2.0, 40.0, rng));
    ModelParams p = classic();
    const DerivedConstants dc = constants_for(p, s);
    p.chi = dc.chi_max;
    p.xi = dc.xi_max;
    StepControl ctl;
    ctl.dt = 0.02;
    for (int n = 0; n < 20; ++n) {
      s = step_imex(s, p, ctl);
      CHECK(min_value(s.u) >= -1e-12);
      CHECK(min_value(s.v) >= -1e-12);
    }
  }
}

}  // TEST_SUITE

TEST_SUITE("solver_picard") {

TEST_CASE("hat scaling") {
  const Grid g = Grid::line(1.0, 8);
  DerivedConstants dc;
  dc.sigma = 3.0;
  dc.r_upper = 0.1;
  const ScaledState h = scale_to_hat(homogeneous_state(g, 3.0, 6.0, 0.5), dc);
  CHECK(h.u_hat[0] == doctest::Approx(0.1));
  CHECK(h.v_hat[0] == doctest::Approx(0.2));
  CHECK(h.t == 0.5);
  const State back = scale_from_hat(h, dc);
  CHECK(back.u[0] == doctest::Approx(3.0));
  CHECK(back.v[0] == doctest::Approx(6.0));
}

TEST_CASE("linear sub-problems") {
  const Grid g = Grid::line(1.0, 16);
  ModelParams p = classic();
  p.a1 = 1;
  p.a2 = 1;
  DerivedConstants dc;
  dc.sigma = 3.0;
  dc.r_upper = 0.1;
  PicardControl ctl;
  const std::vector<double> dts(100, 0.01);
  const Trajectory zeros(dts.size() + 1, Field(g, 0.0));

  // zero initial data stay zero
  Trajectory v = solve_linear_v(zeros, zeros, Field(g, 0.0), p, dc, ctl, dts);
  CHECK(sup_norm(v.back()) == 0.0);
  Trajectory u = solve_linear_u(zeros, zeros, Field(g, 0.0), p, dc, ctl, dts);
  CHECK(sup_norm(u.back()) == 0.0);

  // with frozen zeros the problems reduce to v' = a2 v and u' = -a1 u
  v = solve_linear_v(zeros, zeros, Field(g, 0.02), p, dc, ctl, dts);
  CHECK(v.size() == dts.size() + 1);
  CHECK(v.back()[5] == doctest::Approx(0.02 * std::exp(1.0)).epsilon(0.01));
  u = solve_linear_u(zeros, zeros, Field(g, 0.05), p, dc, ctl, dts);
  CHECK(u.back()[5] == doctest::Approx(0.05 * std::exp(-1.0)).epsilon(0.01));
}

TEST_CASE("scaled equilibrium converges at once") {
  const Grid g = Grid::line(1.0, 32);
  const State s = homogeneous_state(g, 5.0 / 3.0, 4.0 / 3.0);
  const DerivedConstants dc = constants_for(classic(), s);
  PicardControl ctl;
  ctl.step.dt = 0.01;
  const SlabResult r = picard_slab(scale_to_hat(s, dc), classic(), dc, ctl);
  CHECK(r.iterations == 1);
  const State back = scale_from_hat(r.end, dc);
  CHECK(sup_diff(back.u, s.u) < 1e-10);
  CHECK(sup_diff(back.v, s.v) < 1e-10);
}

TEST_CASE("infinite tolerance returns after one iteration") {
  const Grid g = Grid::line(1.0, 32);
  const State s(sample(g, [](double x, double) { return 1 + 0.3 * std::cos(kPi * x); }), Field(g, 1.0));
  const DerivedConstants dc = constants_for(classic(), s);
  PicardControl ctl;
  ctl.fp_tol = std::numeric_limits<double>::infinity();
  CHECK(picard_slab(scale_to_hat(s, dc), classic(), dc, ctl).iterations == 1);
}

TEST_CASE("iteration cap raises NonConvergence with the residual") {
  const Grid g = Grid::line(1.0, 32);
  const State s(sample(g, [](double x, double) { return 1 + 0.3 * std::cos(kPi * x); }), Field(g, 1.0));
  const DerivedConstants dc = constants_for(classic(), s);
  PicardControl ctl;
  ctl.step.dt = 0.05;
  ctl.fp_max_iter = 1;
  ctl.fp_tol = 1e-14;
  try {
    picard_slab(scale_to_hat(s, dc), classic(), dc, ctl);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.iterations() == 1);
    CHECK(e.residual() > 1e-14);
  }
  ctl.step.max_time = 0.2;
  const NormTrace tr = run_picard(s, classic(), dc, ctl);
  CHECK(tr.termination == Termination::solver_failure);
}

TEST_CASE("taxis-free homogeneous run follows the ODE") {
  ModelParams p = classic();
  p.chi = p.xi = 0;
  const Grid g = Grid::line(1.0, 8);
  const State s0 = homogeneous_state(g, 0.5, 2.0);
  const DerivedConstants dc = constants_for(p, s0);
  PicardControl ctl;
  ctl.step.max_time = 1.0;
  double errs[2];
  int k = 0;
  for (double dt : {0.02, 0.01}) {
    ctl.step.dt = dt;
    const NormTrace tr = run_picard(s0, p, dc, ctl);
    REQUIRE(tr.termination == Termination::completed);
    // reference: RK4 on the ODE with a tiny step
    double u = 0.5, v = 2.0;
    const double h = 1e-4;
    auto fu = [&](double a, double b) { return reaction_u(a, b, p); };
    auto fv = [&](double a, double b) { return reaction_v(a, b, p); };
    for (int n = 0; n < 10000; ++n) {
      const double k1u = fu(u, v), k1v = fv(u, v);
      const double k2u = fu(u + h / 2 * k1u, v + h / 2 * k1v), k2v = fv(u + h / 2 * k1u, v + h / 2 * k1v);
      const double k3u = fu(u + h / 2 * k2u, v + h / 2 * k2v), k3v = fv(u + h / 2 * k2u, v + h / 2 * k2v);
      const double k4u = fu(u + h * k3u, v + h * k3v), k4v = fv(u + h * k3u, v + h * k3v);
      u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
      v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    errs[k++] = std::max(std::fabs(tr.final_state->u[2] - u), std::fabs(tr.final_state->v[2] - v));
  }
  CHECK(errs[1] < 0.05);
  CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("run_picard bookkeeping") {
  const Grid g = Grid::line(1.0, 16);
  const State eq = homogeneous_state(g, 5.0 / 3.0, 4.0 / 3.0);
  const DerivedConstants dc = constants_for(classic(), eq);
  PicardControl ctl;
  ctl.step.max_time = 0;
  CHECK(run_picard(eq, classic(), dc, ctl).records.empty());

  ctl.step.max_time = 1;
  ctl.step.dt = 0.05;
  ctl.slab_steps = 2;
  Observers obs;
  obs.record_stride = 2;
  const NormTrace tr = run_picard(eq, classic(), dc, ctl, obs);
  REQUIRE(tr.termination == Termination::completed);
  CHECK(tr.records.size() == 5);  // 10 slabs, every second one
  for (const NormRecord& r : tr.records) {
    REQUIRE(r.picard_iters.has_value());
    CHECK(*r.picard_iters == 1);
    CHECK(std::fabs(r.sup_u - 5.0 / 3.0) < 1e-10);
  }
  CHECK(tr.termination_time == doctest::Approx(1.0));
}

TEST_CASE("picard and imex agree to first order") {
  const Grid g = Grid::line(1.0, 64);
  ModelParams p = classic();
  const State s0(sample(g, [](double x, double) { return 1.5 + 0.5 * std::cos(kPi * x); }),
                 sample(g, [](double x, double) { return 1.2 + 0.4 * std::cos(2 * kPi * x); }));
  const DerivedConstants dc = constants_for(p, s0);
  p.chi = 0.25 * dc.chi_max;
  p.xi = 0.25 * dc.xi_max;
  std::vector<std::pair<double, double>> gaps;
  for (double dt : {8e-3, 4e-3, 2e-3}) {
    PicardControl ctl;
    ctl.step.dt = dt;
    ctl.step.max_time = 2;
    const NormTrace a = run_imex(s0, p, ctl.step);
    const NormTrace b = run_picard(s0, p, dc, ctl);
    gaps.emplace_back(dt, std::max(sup_diff(a.final_state->u, b.final_state->u),
                                   sup_diff(a.final_state->v, b.final_state->v)));
  }
  CHECK(convergence_order(gaps) == doctest::Approx(1.0).epsilon(0.1));
}

}  // TEST_SUITE
