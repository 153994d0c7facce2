#pragma once

// Data-parallel inner loops behind the stencil operators and time steppers.
//
// Every kernel exists as a scalar reference and, where the target supports
// it, an AVX2 variant. Elementwise kernels perform the same IEEE operations in
// the same order in both variants, so their outputs agree bit for bit.
// Reductions that sum (dot, sum_squares) use lane-wise partial sums in the
// SIMD variant and agree only to round-off; max/min reductions are exact.
//
// The active table is picked once at first use: AVX2 when the CPU reports
// it, scalar otherwise. PPTAXIS_KERNELS=scalar|avx2 overrides the choice.

#include <cstddef>
#include <string_view>

namespace pptaxis::kernels {

struct KernelTable {
  std::string_view name;

  /// 1D Laplacian along a contiguous line with reflected ghosts at both ends:
  /// out[i] = ((f[i-1] + f[i+1]) - 2 f[i]) * inv_h2.
  void (*laplacian_line)(const double* f, double* out, std::size_t n, double inv_h2);

  /// One row of the 2D five-point Laplacian. Rows are contiguous along axis 1
  /// (reflected at the row ends); `up`/`down` are the axis-0 neighbour rows,
  /// already reflected by the caller at the domain edge.
  /// out[j] = ((f[j-1] + f[j+1]) - 2 f[j]) * inv_h1sq + ((up[j] + down[j]) - 2 f[j]) * inv_h0sq.
  void (*laplacian_row)(const double* up, const double* mid, const double* down, double* out,
                        std::size_t n, double inv_h0sq, double inv_h1sq);

  /// Donor-cell face flux for coeff * div(c grad p). For face k between
  /// cells lo[k] and hi[k]: g = (p_hi - p_lo) * inv_h; the carrier moves with
  /// velocity -coeff*g, so the upwind value is c_lo when -coeff*g > 0 and
  /// c_hi otherwise; flux[k] = (coeff * g) * c_up.
  void (*upwind_face_flux)(const double* c_lo, const double* c_hi, const double* p_lo,
                           const double* p_hi, double* flux, std::size_t n, double coeff,
                           double inv_h);

  /// out[k] += (f_hi[k] - f_lo[k]) * inv_h.
  void (*flux_divergence_add)(const double* f_lo, const double* f_hi, double* out, std::size_t n,
                              double inv_h);

  /// out[k] = x[k] + a * y[k].
  void (*axpy)(const double* x, const double* y, double* out, std::size_t n, double a);

  /// out[k] = (c0 + ca * A[k]) + cb * B[k].
  void (*affine2)(const double* A, const double* B, double* out, std::size_t n, double c0,
                  double ca, double cb);

  /// Patankar update: out[k] = (x[k] * (1 + dt * gain[k])) / (1 + dt * loss[k]).
  void (*patankar)(const double* x, const double* gain, const double* loss, double* out,
                   std::size_t n, double dt);

  double (*max_abs)(const double* x, std::size_t n);
  double (*min_value)(const double* x, std::size_t n);
  double (*max_abs_diff)(const double* x, const double* y, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
};

const KernelTable& scalar_table();

/// nullptr when the build has no AVX2 variant or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// Table used by the library. Selected once, thread-safe.
const KernelTable& active();

}  // namespace pptaxis::kernels
