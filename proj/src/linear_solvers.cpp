#include "pptaxis/linear_solvers.hpp"

#include <cmath>
#include <vector>

#include "pptaxis/kernels.hpp"

namespace pptaxis {

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<const double> rhs,
                       std::span<double> x) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n || x.size() != n)
    throw std::invalid_argument("tridiagonal operand sizes differ");
  if (n == 0) return;
  std::vector<double> c_prime(n);
  c_prime[0] = upper[0] / diag[0];
  x[0] = rhs[0] / diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double factor = 1.0 / (diag[i] - lower[i] * c_prime[i - 1]);
    c_prime[i] = upper[i] * factor;
    x[i] = (rhs[i] - lower[i] * x[i - 1]) * factor;
  }
  for (std::size_t i = n - 1; i > 0; --i) x[i - 1] -= c_prime[i - 1] * x[i];
}

namespace {

Field solve_line(const Field& f, double diffusivity, double dt) {
  const std::size_t n = f.size();
  const double h = f.grid.spacing(0);
  const double k = dt * diffusivity / (h * h);
  std::vector<double> lower(n, -k), diag(n, 1.0 + 2.0 * k), upper(n, -k);
  diag[0] = 1.0 + k;
  diag[n - 1] = 1.0 + k;
  Field g(f.grid);
  solve_tridiagonal(lower, diag, upper, f.values, g.values);
  return g;
}

// y = x - dt d Δ_h x
void apply_operator(const Field& x, Field& y, double scale) {
  const Field lap = laplacian_neumann(x);
  kernels::active().axpy(x.values.data(), lap.values.data(), y.values.data(), x.size(), -scale);
}

Field solve_cg(const Field& f, double diffusivity, double dt, const DiffusionSolveOptions& opts) {
  const auto& k = kernels::active();
  const std::size_t n = f.size();
  const double scale = dt * diffusivity;
  const std::size_t cap = opts.max_iter ? opts.max_iter : 10 * n;

  Field x = f;
  Field ax(f.grid);
  apply_operator(x, ax, scale);
  Field r(f.grid), p(f.grid), ap(f.grid);
  k.axpy(f.values.data(), ax.values.data(), r.values.data(), n, -1.0);
  p = r;

  const double bnorm = std::sqrt(k.dot(f.values.data(), f.values.data(), n));
  const double target = opts.rel_tol * (bnorm > 0 ? bnorm : 1.0);
  double rr = k.dot(r.values.data(), r.values.data(), n);
  std::size_t it = 0;
  while (std::sqrt(rr) > target) {
    if (it == cap)
      throw SolverError("implicit diffusion: CG did not converge", std::sqrt(rr) / (bnorm > 0 ? bnorm : 1.0), it);
    apply_operator(p, ap, scale);
    const double alpha = rr / k.dot(p.values.data(), ap.values.data(), n);
    k.axpy(x.values.data(), p.values.data(), x.values.data(), n, alpha);
    k.axpy(r.values.data(), ap.values.data(), r.values.data(), n, -alpha);
    const double rr_next = k.dot(r.values.data(), r.values.data(), n);
    const double beta = rr_next / rr;
    k.axpy(r.values.data(), p.values.data(), p.values.data(), n, beta);
    rr = rr_next;
    ++it;
    if (!std::isfinite(rr))
      throw SolverError("implicit diffusion: non-finite residual", rr, it);
  }
  return x;
}

}  // namespace

Field solve_diffusion_implicit(const Field& f, double diffusivity, double dt,
                               const DiffusionSolveOptions& opts) {
  if (!(diffusivity > 0) || !(dt > 0)) throw std::invalid_argument("diffusivity and dt must be positive");
  if (f.grid.dim() == 1) return solve_line(f, diffusivity, dt);
  return solve_cg(f, diffusivity, dt, opts);
}

}  // namespace pptaxis
