#include <immintrin.h>

#include <cmath>
#include <limits>

#include "kernels_impl.hpp"

namespace pptaxis::kernels {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t W = 4;

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

double hsum(__m256d v) {
  alignas(32) double lane[W];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double hmax(__m256d v) {
  alignas(32) double lane[W];
  _mm256_store_pd(lane, v);
  double m = lane[0];
  for (std::size_t k = 1; k < W; ++k)
    if (lane[k] > m) m = lane[k];
  return m;
}

double hmin(__m256d v) {
  alignas(32) double lane[W];
  _mm256_store_pd(lane, v);
  double m = lane[0];
  for (std::size_t k = 1; k < W; ++k)
    if (lane[k] < m) m = lane[k];
  return m;
}

void laplacian_line(const double* f, double* out, std::size_t n, double inv_h2) {
  if (n == 1) {
    out[0] = 0.0;
    return;
  }
  out[0] = ((f[0] + f[1]) - 2.0 * f[0]) * inv_h2;
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d s = _mm256_set1_pd(inv_h2);
  std::size_t i = 1;
  for (; i + W < n; i += W) {
    const __m256d l = _mm256_loadu_pd(f + i - 1);
    const __m256d r = _mm256_loadu_pd(f + i + 1);
    const __m256d c = _mm256_loadu_pd(f + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_sub_pd(_mm256_add_pd(l, r), _mm256_mul_pd(two, c)), s));
  }
  for (; i + 1 < n; ++i) out[i] = ((f[i - 1] + f[i + 1]) - 2.0 * f[i]) * inv_h2;
  out[n - 1] = ((f[n - 2] + f[n - 1]) - 2.0 * f[n - 1]) * inv_h2;
}

void laplacian_row(const double* up, const double* mid, const double* down, double* out,
                   std::size_t n, double inv_h0sq, double inv_h1sq) {
  auto cell = [&](std::size_t j) {
    const double left = j == 0 ? mid[0] : mid[j - 1];
    const double right = j + 1 == n ? mid[n - 1] : mid[j + 1];
    out[j] = ((left + right) - 2.0 * mid[j]) * inv_h1sq +
             ((up[j] + down[j]) - 2.0 * mid[j]) * inv_h0sq;
  };
  if (n <= 2) {
    for (std::size_t j = 0; j < n; ++j) cell(j);
    return;
  }
  cell(0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d s0 = _mm256_set1_pd(inv_h0sq);
  const __m256d s1 = _mm256_set1_pd(inv_h1sq);
  std::size_t j = 1;
  for (; j + W < n; j += W) {
    const __m256d c = _mm256_loadu_pd(mid + j);
    const __m256d c2 = _mm256_mul_pd(two, c);
    const __m256d along = _mm256_mul_pd(
        _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(mid + j - 1), _mm256_loadu_pd(mid + j + 1)), c2), s1);
    const __m256d across = _mm256_mul_pd(
        _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(up + j), _mm256_loadu_pd(down + j)), c2), s0);
    _mm256_storeu_pd(out + j, _mm256_add_pd(along, across));
  }
  for (; j < n; ++j) cell(j);
}

void upwind_face_flux(const double* c_lo, const double* c_hi, const double* p_lo,
                      const double* p_hi, double* flux, std::size_t n, double coeff,
                      double inv_h) {
  const __m256d vc = _mm256_set1_pd(coeff);
  const __m256d vh = _mm256_set1_pd(inv_h);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + W <= n; k += W) {
    const __m256d g = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(p_hi + k), _mm256_loadu_pd(p_lo + k)), vh);
    const __m256d cg = _mm256_mul_pd(vc, g);
    // -cg > 0  <=>  cg < 0 (both false for NaN)
    const __m256d from_lo = _mm256_cmp_pd(cg, zero, _CMP_LT_OQ);
    const __m256d c_up = _mm256_blendv_pd(_mm256_loadu_pd(c_hi + k), _mm256_loadu_pd(c_lo + k), from_lo);
    _mm256_storeu_pd(flux + k, _mm256_mul_pd(cg, c_up));
  }
  for (; k < n; ++k) {
    const double g = (p_hi[k] - p_lo[k]) * inv_h;
    const double cg = coeff * g;
    const double c_up = (-cg > 0.0) ? c_lo[k] : c_hi[k];
    flux[k] = cg * c_up;
  }
}

void flux_divergence_add(const double* f_lo, const double* f_hi, double* out, std::size_t n,
                         double inv_h) {
  const __m256d vh = _mm256_set1_pd(inv_h);
  std::size_t k = 0;
  for (; k + W <= n; k += W) {
    const __m256d d = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(f_hi + k), _mm256_loadu_pd(f_lo + k)), vh);
    _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_loadu_pd(out + k), d));
  }
  for (; k < n; ++k) out[k] += (f_hi[k] - f_lo[k]) * inv_h;
}

void axpy(const double* x, const double* y, double* out, std::size_t n, double a) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + W <= n; k += W)
    _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_loadu_pd(x + k), _mm256_mul_pd(va, _mm256_loadu_pd(y + k))));
  for (; k < n; ++k) out[k] = x[k] + a * y[k];
}

void affine2(const double* A, const double* B, double* out, std::size_t n, double c0, double ca,
             double cb) {
  const __m256d v0 = _mm256_set1_pd(c0);
  const __m256d va = _mm256_set1_pd(ca);
  const __m256d vb = _mm256_set1_pd(cb);
  std::size_t k = 0;
  for (; k + W <= n; k += W) {
    const __m256d t = _mm256_add_pd(v0, _mm256_mul_pd(va, _mm256_loadu_pd(A + k)));
    _mm256_storeu_pd(out + k, _mm256_add_pd(t, _mm256_mul_pd(vb, _mm256_loadu_pd(B + k))));
  }
  for (; k < n; ++k) out[k] = (c0 + ca * A[k]) + cb * B[k];
}

void patankar(const double* x, const double* gain, const double* loss, double* out, std::size_t n,
              double dt) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t k = 0;
  for (; k + W <= n; k += W) {
    const __m256d num = _mm256_mul_pd(_mm256_loadu_pd(x + k),
                                      _mm256_add_pd(one, _mm256_mul_pd(vdt, _mm256_loadu_pd(gain + k))));
    const __m256d den = _mm256_add_pd(one, _mm256_mul_pd(vdt, _mm256_loadu_pd(loss + k)));
    _mm256_storeu_pd(out + k, _mm256_div_pd(num, den));
  }
  for (; k < n; ++k) out[k] = (x[k] * (1.0 + dt * gain[k])) / (1.0 + dt * loss[k]);
}

double max_abs(const double* x, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  __m256d nan = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + W <= n; k += W) {
    const __m256d a = abs_pd(_mm256_loadu_pd(x + k));
    nan = _mm256_or_pd(nan, _mm256_cmp_pd(a, a, _CMP_UNORD_Q));
    m = _mm256_max_pd(m, a);
  }
  bool any_nan = _mm256_movemask_pd(nan) != 0;
  double r = hmax(m);
  for (; k < n; ++k) {
    const double a = std::fabs(x[k]);
    any_nan |= std::isnan(a);
    if (a > r) r = a;
  }
  return any_nan ? kNaN : r;
}

double min_value(const double* x, std::size_t n) {
  __m256d m = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d nan = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + W <= n; k += W) {
    const __m256d a = _mm256_loadu_pd(x + k);
    nan = _mm256_or_pd(nan, _mm256_cmp_pd(a, a, _CMP_UNORD_Q));
    m = _mm256_min_pd(m, a);
  }
  bool any_nan = _mm256_movemask_pd(nan) != 0;
  double r = hmin(m);
  for (; k < n; ++k) {
    any_nan |= std::isnan(x[k]);
    if (x[k] < r) r = x[k];
  }
  return any_nan ? kNaN : r;
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  __m256d nan = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + W <= n; k += W) {
    const __m256d a = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
    nan = _mm256_or_pd(nan, _mm256_cmp_pd(a, a, _CMP_UNORD_Q));
    m = _mm256_max_pd(m, a);
  }
  bool any_nan = _mm256_movemask_pd(nan) != 0;
  double r = hmax(m);
  for (; k < n; ++k) {
    const double a = std::fabs(x[k] - y[k]);
    any_nan |= std::isnan(a);
    if (a > r) r = a;
  }
  return any_nan ? kNaN : r;
}

double sum_squares(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + W <= n; k += W) {
    const __m256d a = _mm256_loadu_pd(x + k);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(a, a));
  }
  double s = hsum(acc);
  for (; k < n; ++k) s += x[k] * x[k];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + W <= n; k += W)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  double s = hsum(acc);
  for (; k < n; ++k) s += x[k] * y[k];
  return s;
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{
      "avx2",       laplacian_line, laplacian_row, upwind_face_flux, flux_divergence_add,
      axpy,         affine2,        patankar,      max_abs,          min_value,
      max_abs_diff, sum_squares,    dot,
  };
  return table;
}

}  // namespace pptaxis::kernels
