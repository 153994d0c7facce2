#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "pptaxis/grid_fields.hpp"

namespace pptaxis {

/// An iterative solve hit its iteration cap.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual, std::size_t iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

struct DiffusionSolveOptions {
  double rel_tol = 1e-10;
  /// 0 selects 10 x cell count.
  std::size_t max_iter = 0;
};

/// Thomas algorithm for a tridiagonal system. lower[0] and upper[n-1] are ignored.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<const double> rhs,
                       std::span<double> x);

/// Solves (I - dt d Δ_h) g = f with the Neumann stencil: Thomas in 1D,
/// conjugate gradients in 2D.
Field solve_diffusion_implicit(const Field& f, double diffusivity, double dt,
                               const DiffusionSolveOptions& opts = {});

}  // namespace pptaxis
