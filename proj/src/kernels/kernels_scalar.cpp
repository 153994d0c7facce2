#include <cmath>
#include <limits>

#include "kernels_impl.hpp"

namespace pptaxis::kernels {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void laplacian_line(const double* f, double* out, std::size_t n, double inv_h2) {
  if (n == 1) {
    out[0] = 0.0;
    return;
  }
  out[0] = ((f[0] + f[1]) - 2.0 * f[0]) * inv_h2;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = ((f[i - 1] + f[i + 1]) - 2.0 * f[i]) * inv_h2;
  out[n - 1] = ((f[n - 2] + f[n - 1]) - 2.0 * f[n - 1]) * inv_h2;
}

void laplacian_row(const double* up, const double* mid, const double* down, double* out,
                   std::size_t n, double inv_h0sq, double inv_h1sq) {
  for (std::size_t j = 0; j < n; ++j) {
    const double left = j == 0 ? mid[0] : mid[j - 1];
    const double right = j + 1 == n ? mid[n - 1] : mid[j + 1];
    out[j] = ((left + right) - 2.0 * mid[j]) * inv_h1sq +
             ((up[j] + down[j]) - 2.0 * mid[j]) * inv_h0sq;
  }
}

void upwind_face_flux(const double* c_lo, const double* c_hi, const double* p_lo,
                      const double* p_hi, double* flux, std::size_t n, double coeff,
                      double inv_h) {
  for (std::size_t k = 0; k < n; ++k) {
    const double g = (p_hi[k] - p_lo[k]) * inv_h;
    const double cg = coeff * g;
    const double c_up = (-cg > 0.0) ? c_lo[k] : c_hi[k];
    flux[k] = cg * c_up;
  }
}

void flux_divergence_add(const double* f_lo, const double* f_hi, double* out, std::size_t n,
                         double inv_h) {
  for (std::size_t k = 0; k < n; ++k) out[k] += (f_hi[k] - f_lo[k]) * inv_h;
}

void axpy(const double* x, const double* y, double* out, std::size_t n, double a) {
  for (std::size_t k = 0; k < n; ++k) out[k] = x[k] + a * y[k];
}

void affine2(const double* A, const double* B, double* out, std::size_t n, double c0, double ca,
             double cb) {
  for (std::size_t k = 0; k < n; ++k) out[k] = (c0 + ca * A[k]) + cb * B[k];
}

void patankar(const double* x, const double* gain, const double* loss, double* out, std::size_t n,
              double dt) {
  for (std::size_t k = 0; k < n; ++k)
    out[k] = (x[k] * (1.0 + dt * gain[k])) / (1.0 + dt * loss[k]);
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  bool nan = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::fabs(x[k]);
    nan |= std::isnan(a);
    if (a > m) m = a;
  }
  return nan ? kNaN : m;
}

double min_value(const double* x, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  bool nan = false;
  for (std::size_t k = 0; k < n; ++k) {
    nan |= std::isnan(x[k]);
    if (x[k] < m) m = x[k];
  }
  return nan ? kNaN : m;
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  bool nan = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::fabs(x[k] - y[k]);
    nan |= std::isnan(a);
    if (a > m) m = a;
  }
  return nan ? kNaN : m;
}

double sum_squares(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += x[k] * x[k];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += x[k] * y[k];
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      "scalar",    laplacian_line, laplacian_row, upwind_face_flux, flux_divergence_add,
      axpy,        affine2,        patankar,      max_abs,          min_value,
      max_abs_diff, sum_squares,   dot,
  };
  return table;
}

}  // namespace pptaxis::kernels
