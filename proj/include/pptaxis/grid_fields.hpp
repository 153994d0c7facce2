#pragma once

// Cell-centred grids on an interval or a rectangle, Neumann stencils and
// grid-scale norms.
//
// Homogeneous Neumann conditions are imposed through reflected ghost cells:
// the ghost value equals the adjacent interior value, so every boundary face
// carries zero flux.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pptaxis {

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Grid {
 public:
  static constexpr std::size_t kMinCells = 3;

  static Grid line(double length, std::size_t cells);
  static Grid rect(double length_x, double length_y, std::size_t cells_x, std::size_t cells_y);

  int dim() const noexcept { return dim_; }
  double extent(int axis) const { return extents_.at(axis); }
  std::size_t cells(int axis) const { return cells_.at(axis); }
  double spacing(int axis) const { return spacing_.at(axis); }
  double min_spacing() const noexcept;

  std::size_t size() const noexcept { return dim_ == 1 ? cells_[0] : cells_[0] * cells_[1]; }
  double cell_volume() const noexcept { return dim_ == 1 ? spacing_[0] : spacing_[0] * spacing_[1]; }
  double volume() const noexcept { return dim_ == 1 ? extents_[0] : extents_[0] * extents_[1]; }

  /// Cell-centre coordinate along `axis` of cell index `i` on that axis.
  double center(int axis, std::size_t i) const { return (static_cast<double>(i) + 0.5) * spacing_.at(axis); }

  /// Flat index of cell (i0, i1); axis 0 is slowest.
  std::size_t index(std::size_t i0, std::size_t i1 = 0) const noexcept { return dim_ == 1 ? i0 : i0 * cells_[1] + i1; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Grid(int dim, std::array<double, 2> extents, std::array<std::size_t, 2> cells);

  int dim_ = 1;
  std::array<double, 2> extents_{1.0, 1.0};
  std::array<std::size_t, 2> cells_{kMinCells, 1};
  std::array<double, 2> spacing_{1.0, 1.0};
};

/// One real per cell, row-major with axis 0 slowest.
struct Field {
  Field(Grid g, double value = 0.0) : grid(std::move(g)), values(grid.size(), value) {}
  Field(Grid g, std::vector<double> v);

  Grid grid;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
};

/// dim components per cell, component-major: values[c * size + k].
struct VectorField {
  explicit VectorField(Grid g) : grid(std::move(g)), values(grid.dim() * grid.size(), 0.0) {}

  Grid grid;
  std::vector<double> values;

  std::span<double> component(int c) { return {values.data() + c * grid.size(), grid.size()}; }
  std::span<const double> component(int c) const { return {values.data() + c * grid.size(), grid.size()}; }
};

void require_same_grid(const Field& a, const Field& b);

/// Sample a function of cell-centre coordinates (y ignored in 1D).
template <class F>
Field sample(const Grid& g, F&& f) {
  Field out(g);
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < g.cells(0); ++i) out[i] = f(g.center(0, i), 0.0);
  } else {
    for (std::size_t i = 0; i < g.cells(0); ++i)
      for (std::size_t j = 0; j < g.cells(1); ++j) out[g.index(i, j)] = f(g.center(0, i), g.center(1, j));
  }
  return out;
}

// Stencil operators

Field laplacian_neumann(const Field& f);
VectorField gradient_neumann(const Field& f);

/// coeff * div(carrier * grad(potential)) in flux form with donor-cell
/// upwinding of the carrier and zero flux through the boundary.
Field div_flux_upwind(const Field& carrier, const Field& potential, double coeff);

/// Largest |coeff * face gradient of potential| over all interior faces.
double max_face_velocity(const Field& potential, double coeff);

/// Pure second differences per axis (reflected ghosts), then the mixed
/// difference in 2D. Used by the C2 proxy.
std::vector<Field> second_differences(const Field& f);

// Norms

double sup_norm(const Field& f);
double l2_norm(const Field& f);
double min_value(const Field& f);
double integral(const Field& f);

/// max |f(x)-f(y)| / |x-y|^alpha over cell-centre pairs. All pairs up to
/// kHolderAllPairsLimit cells; above that, all pairs along axis-aligned lines.
inline constexpr std::size_t kHolderAllPairsLimit = 10000;
double holder_seminorm_proxy(const Field& f, double alpha);

/// sup|f| + max|gradient components| + max|second-difference components|.
double c2_norm_proxy(const Field& f);

/// c2_norm_proxy plus the Hölder seminorm proxy of every second-difference
/// component. A lower-bound estimate of the C^{2+alpha} norm.
double c2alpha_norm_proxy(const Field& f, double alpha);

struct HolderProductCheck {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
};

/// |fg|_a <= |f|_0|g|_0 + |f|_0|g|_a + |f|_a|g|_0 with |.|_a = |.|_0 + seminorm proxy.
HolderProductCheck holder_product_check(const Field& f, const Field& g, double alpha);

/// Average a field onto a grid coarser by an integer factor per axis.
Field restrict_average(const Field& fine, const Grid& coarse);

}  // namespace pptaxis
