#include "pptaxis/grid_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pptaxis/kernels.hpp"

namespace pptaxis {

Grid::Grid(int dim, std::array<double, 2> extents, std::array<std::size_t, 2> cells)
    : dim_(dim), extents_(extents), cells_(cells) {
  for (int a = 0; a < dim_; ++a) {
    if (!(extents_[a] > 0) || !std::isfinite(extents_[a]))
      throw std::invalid_argument("grid extent must be positive and finite");
    if (cells_[a] < kMinCells) throw std::invalid_argument("grid needs at least 3 cells per axis");
    spacing_[a] = extents_[a] / static_cast<double>(cells_[a]);
  }
}

Grid Grid::line(double length, std::size_t cells) { return Grid(1, {length, 1.0}, {cells, 1}); }

Grid Grid::rect(double length_x, double length_y, std::size_t cells_x, std::size_t cells_y) {
  return Grid(2, {length_x, length_y}, {cells_x, cells_y});
}

double Grid::min_spacing() const noexcept {
  return dim_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

Field::Field(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw GridMismatch("field value count does not match grid");
}

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid == b.grid)) throw GridMismatch("fields live on different grids");
}

Field laplacian_neumann(const Field& f) {
  const auto& k = kernels::active();
  const Grid& g = f.grid;
  Field out(g);
  if (g.dim() == 1) {
    const double h = g.spacing(0);
    k.laplacian_line(f.values.data(), out.values.data(), g.size(), 1.0 / (h * h));
    return out;
  }
  const std::size_t n0 = g.cells(0), n1 = g.cells(1);
  const double h0 = g.spacing(0), h1 = g.spacing(1);
  const double* v = f.values.data();
  for (std::size_t i = 0; i < n0; ++i) {
    const double* mid = v + i * n1;
    const double* up = i == 0 ? mid : mid - n1;
    const double* down = i + 1 == n0 ? mid : mid + n1;
    k.laplacian_row(up, mid, down, out.values.data() + i * n1, n1, 1.0 / (h0 * h0), 1.0 / (h1 * h1));
  }
  return out;
}

VectorField gradient_neumann(const Field& f) {
  const Grid& g = f.grid;
  VectorField out(g);
  const std::size_t n0 = g.cells(0);
  const std::size_t n1 = g.dim() == 1 ? 1 : g.cells(1);
  auto at = [&](std::size_t i, std::size_t j) { return f.values[i * n1 + j]; };

  auto d0 = out.component(0);
  const double inv0 = 1.0 / (2.0 * g.spacing(0));
  for (std::size_t i = 0; i < n0; ++i) {
    const std::size_t im = i == 0 ? 0 : i - 1;
    const std::size_t ip = i + 1 == n0 ? i : i + 1;
    for (std::size_t j = 0; j < n1; ++j) d0[i * n1 + j] = (at(ip, j) - at(im, j)) * inv0;
  }
  if (g.dim() == 2) {
    auto d1 = out.component(1);
    const double inv1 = 1.0 / (2.0 * g.spacing(1));
    for (std::size_t i = 0; i < n0; ++i)
      for (std::size_t j = 0; j < n1; ++j) {
        const std::size_t jm = j == 0 ? 0 : j - 1;
        const std::size_t jp = j + 1 == n1 ? j : j + 1;
        d1[i * n1 + j] = (at(i, jp) - at(i, jm)) * inv1;
      }
  }
  return out;
}

Field div_flux_upwind(const Field& carrier, const Field& potential, double coeff) {
  require_same_grid(carrier, potential);
  const auto& k = kernels::active();
  const Grid& g = carrier.grid;
  Field out(g);
  const double* c = carrier.values.data();
  const double* p = potential.values.data();

  if (g.dim() == 1) {
    const std::size_t n = g.size();
    const double inv_h = 1.0 / g.spacing(0);
    // padded[0] and padded[n] are the zero boundary fluxes
    std::vector<double> padded(n + 1, 0.0);
    k.upwind_face_flux(c, c + 1, p, p + 1, padded.data() + 1, n - 1, coeff, inv_h);
    k.flux_divergence_add(padded.data(), padded.data() + 1, out.values.data(), n, inv_h);
    return out;
  }

  const std::size_t n0 = g.cells(0), n1 = g.cells(1);
  const double inv_h0 = 1.0 / g.spacing(0), inv_h1 = 1.0 / g.spacing(1);
  // axis 0: face rows between cell rows i and i+1
  std::vector<double> faces0((n0 + 1) * n1, 0.0);
  for (std::size_t i = 0; i + 1 < n0; ++i)
    k.upwind_face_flux(c + i * n1, c + (i + 1) * n1, p + i * n1, p + (i + 1) * n1,
                       faces0.data() + (i + 1) * n1, n1, coeff, inv_h0);
  for (std::size_t i = 0; i < n0; ++i)
    k.flux_divergence_add(faces0.data() + i * n1, faces0.data() + (i + 1) * n1,
                          out.values.data() + i * n1, n1, inv_h0);
  // axis 1: within each row
  std::vector<double> padded(n1 + 1, 0.0);
  for (std::size_t i = 0; i < n0; ++i) {
    const double* cr = c + i * n1;
    const double* pr = p + i * n1;
    k.upwind_face_flux(cr, cr + 1, pr, pr + 1, padded.data() + 1, n1 - 1, coeff, inv_h1);
    k.flux_divergence_add(padded.data(), padded.data() + 1, out.values.data() + i * n1, n1, inv_h1);
  }
  return out;
}

double max_face_velocity(const Field& potential, double coeff) {
  const Grid& g = potential.grid;
  const std::size_t n0 = g.cells(0);
  const std::size_t n1 = g.dim() == 1 ? 1 : g.cells(1);
  const auto& p = potential.values;
  double m = 0.0;
  const double s0 = std::fabs(coeff) / g.spacing(0);
  for (std::size_t i = 0; i + 1 < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) m = std::max(m, s0 * std::fabs(p[(i + 1) * n1 + j] - p[i * n1 + j]));
  if (g.dim() == 2) {
    const double s1 = std::fabs(coeff) / g.spacing(1);
    for (std::size_t i = 0; i < n0; ++i)
      for (std::size_t j = 0; j + 1 < n1; ++j) m = std::max(m, s1 * std::fabs(p[i * n1 + j + 1] - p[i * n1 + j]));
  }
  for (double x : p)
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
  return m;
}

std::vector<Field> second_differences(const Field& f) {
  const Grid& g = f.grid;
  const std::size_t n0 = g.cells(0);
  const std::size_t n1 = g.dim() == 1 ? 1 : g.cells(1);
  auto at = [&](std::size_t i, std::size_t j) { return f.values[i * n1 + j]; };
  std::vector<Field> out;

  Field d00(g);
  const double inv00 = 1.0 / (g.spacing(0) * g.spacing(0));
  for (std::size_t i = 0; i < n0; ++i) {
    const std::size_t im = i == 0 ? 0 : i - 1;
    const std::size_t ip = i + 1 == n0 ? i : i + 1;
    for (std::size_t j = 0; j < n1; ++j) d00[i * n1 + j] = ((at(im, j) + at(ip, j)) - 2.0 * at(i, j)) * inv00;
  }
  out.push_back(std::move(d00));
  if (g.dim() == 1) return out;

  Field d11(g), d01(g);
  const double inv11 = 1.0 / (g.spacing(1) * g.spacing(1));
  const double inv01 = 1.0 / (4.0 * g.spacing(0) * g.spacing(1));
  for (std::size_t i = 0; i < n0; ++i) {
    const std::size_t im = i == 0 ? 0 : i - 1;
    const std::size_t ip = i + 1 == n0 ? i : i + 1;
    for (std::size_t j = 0; j < n1; ++j) {
      const std::size_t jm = j == 0 ? 0 : j - 1;
      const std::size_t jp = j + 1 == n1 ? j : j + 1;
      d11[i * n1 + j] = ((at(i, jm) + at(i, jp)) - 2.0 * at(i, j)) * inv11;
      d01[i * n1 + j] = ((at(ip, jp) - at(ip, jm)) - (at(im, jp) - at(im, jm))) * inv01;
    }
  }
  out.push_back(std::move(d11));
  out.push_back(std::move(d01));
  return out;
}

double sup_norm(const Field& f) { return kernels::active().max_abs(f.values.data(), f.size()); }

double l2_norm(const Field& f) {
  return std::sqrt(kernels::active().sum_squares(f.values.data(), f.size()) * f.grid.cell_volume());
}

double min_value(const Field& f) { return kernels::active().min_value(f.values.data(), f.size()); }

double integral(const Field& f) {
  double s = 0.0;
  for (double x : f.values) s += x;
  return s * f.grid.cell_volume();
}

namespace {

double holder_quotient(double df, double dist, double alpha) {
  return std::fabs(df) / std::pow(dist, alpha);
}

}  // namespace

double holder_seminorm_proxy(const Field& f, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0,1)");
  const Grid& g = f.grid;
  const std::size_t n = g.size();
  double best = 0.0;

  if (g.dim() == 1) {
    const double h = g.spacing(0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        best = std::max(best, holder_quotient(f[i] - f[j], static_cast<double>(j - i) * h, alpha));
    return best;
  }

  const std::size_t n0 = g.cells(0), n1 = g.cells(1);
  const double h0 = g.spacing(0), h1 = g.spacing(1);
  if (n <= kHolderAllPairsLimit) {
    for (std::size_t a = 0; a < n; ++a) {
      const double xa = static_cast<double>(a / n1) * h0, ya = static_cast<double>(a % n1) * h1;
      for (std::size_t b = a + 1; b < n; ++b) {
        const double dx = static_cast<double>(b / n1) * h0 - xa;
        const double dy = static_cast<double>(b % n1) * h1 - ya;
        best = std::max(best, holder_quotient(f[a] - f[b], std::hypot(dx, dy), alpha));
      }
    }
    return best;
  }
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j)
      for (std::size_t jj = j + 1; jj < n1; ++jj)
        best = std::max(best, holder_quotient(f[i * n1 + j] - f[i * n1 + jj], static_cast<double>(jj - j) * h1, alpha));
  for (std::size_t j = 0; j < n1; ++j)
    for (std::size_t i = 0; i < n0; ++i)
      for (std::size_t ii = i + 1; ii < n0; ++ii)
        best = std::max(best, holder_quotient(f[i * n1 + j] - f[ii * n1 + j], static_cast<double>(ii - i) * h0, alpha));
  return best;
}

double c2_norm_proxy(const Field& f) {
  double grad = 0.0;
  const VectorField gr = gradient_neumann(f);
  for (double x : gr.values) grad = std::max(grad, std::fabs(x));
  double second = 0.0;
  for (const Field& d : second_differences(f)) second = std::max(second, sup_norm(d));
  return sup_norm(f) + grad + second;
}

double c2alpha_norm_proxy(const Field& f, double alpha) {
  double seminorm = 0.0;
  for (const Field& d : second_differences(f)) seminorm = std::max(seminorm, holder_seminorm_proxy(d, alpha));
  return c2_norm_proxy(f) + seminorm;
}

HolderProductCheck holder_product_check(const Field& f, const Field& g, double alpha) {
  require_same_grid(f, g);
  Field fg(f.grid);
  for (std::size_t k = 0; k < fg.size(); ++k) fg[k] = f[k] * g[k];
  const double f0 = sup_norm(f), g0 = sup_norm(g);
  const double fa = f0 + holder_seminorm_proxy(f, alpha);
  const double ga = g0 + holder_seminorm_proxy(g, alpha);
  HolderProductCheck r;
  r.lhs = sup_norm(fg) + holder_seminorm_proxy(fg, alpha);
  r.rhs = f0 * g0 + f0 * ga + fa * g0;
  r.slack = r.rhs - r.lhs;
  r.holds = r.slack >= 0;
  return r;
}

Field restrict_average(const Field& fine, const Grid& coarse) {
  const Grid& g = fine.grid;
  if (g.dim() != coarse.dim()) throw GridMismatch("restriction across dimensions");
  std::array<std::size_t, 2> ratio{1, 1};
  for (int a = 0; a < g.dim(); ++a) {
    if (g.cells(a) % coarse.cells(a) != 0 || g.extent(a) != coarse.extent(a))
      throw GridMismatch("coarse grid is not an integer coarsening of the fine grid");
    ratio[a] = g.cells(a) / coarse.cells(a);
  }
  Field out(coarse);
  const std::size_t n1 = g.dim() == 1 ? 1 : g.cells(1);
  const std::size_t c1 = g.dim() == 1 ? 1 : coarse.cells(1);
  const double weight = 1.0 / static_cast<double>(ratio[0] * ratio[1]);
  for (std::size_t i = 0; i < g.cells(0); ++i)
    for (std::size_t j = 0; j < n1; ++j) out[(i / ratio[0]) * c1 + j / ratio[1]] += fine[i * n1 + j] * weight;
  return out;
}

}  // namespace pptaxis
