#pragma once

// Discrete measures on uniform 1D/2D grids. Densities are cell averages
// (mass per length), so mass bookkeeping is exact and push-forwards move
// cell masses rather than point values.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wgf {

class Grid1D {
 public:
  Grid1D(std::size_t n_cells, double x_min, double x_max);

  std::size_t n_cells() const noexcept { return n_; }
  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  double length() const noexcept { return x_max_ - x_min_; }
  double h() const noexcept { return h_; }
  double center(std::size_t c) const noexcept { return x_min_ + (static_cast<double>(c) + 0.5) * h_; }
  double edge(std::size_t e) const noexcept { return x_min_ + static_cast<double>(e) * h_; }

  /// Cell containing x; points on an interior edge belong to the cell on the right,
  /// x_max belongs to the last cell. Values outside the interval are clamped.
  std::size_t locate(double x) const noexcept;

  bool contains(double x, double slack = 0.0) const noexcept {
    return x >= x_min_ - slack && x <= x_max_ + slack;
  }

  friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept {
    return a.n_ == b.n_ && a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_;
  }

 private:
  std::size_t n_;
  double x_min_;
  double x_max_;
  double h_;
};

struct Grid2D {
  Grid1D axis1;
  Grid1D axis2;

  std::size_t n1() const noexcept { return axis1.n_cells(); }
  std::size_t n2() const noexcept { return axis2.n_cells(); }
  double h1() const noexcept { return axis1.h(); }
  double h2() const noexcept { return axis2.h(); }
  std::size_t size() const noexcept { return n1() * n2(); }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * n2() + j; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

/// Single-species density: cell averages on a 1D grid.
struct Density {
  Grid1D grid;
  std::vector<double> values;

  Density(Grid1D g, std::vector<double> v);
  explicit Density(Grid1D g) : Density(g, std::vector<double>(g.n_cells(), 0.0)) {}

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t c) const noexcept { return values[c]; }
  double& operator[](std::size_t c) noexcept { return values[c]; }
};

/// N species on a shared grid; species[i][c] is the cell average of u_i.
struct DensityVector {
  Grid1D grid;
  std::vector<std::vector<double>> species;

  DensityVector(Grid1D g, std::vector<std::vector<double>> s);
  DensityVector(Grid1D g, std::size_t n_species)
      : DensityVector(g, std::vector<std::vector<double>>(n_species, std::vector<double>(g.n_cells(), 0.0))) {}
  explicit DensityVector(const Density& d) : DensityVector(d.grid, {d.values}) {}

  std::size_t n_species() const noexcept { return species.size(); }
  Density component(std::size_t i) const { return Density(grid, species.at(i)); }
  void set_component(std::size_t i, const Density& d);
};

/// Positions X_l of a measure at the mass levels m_l = (l + 1/2) / L.
struct QuantileMap {
  std::vector<double> positions;

  std::size_t levels() const noexcept { return positions.size(); }
  double level(std::size_t l) const noexcept {
    return (static_cast<double>(l) + 0.5) / static_cast<double>(positions.size());
  }
  bool is_monotone() const noexcept;
};

/// Row-major n1 x n2 cell averages; values[grid.index(i, j)] sits at (x1_i, x2_j).
struct JointDensity {
  Grid2D grid;
  std::vector<double> values;

  JointDensity(Grid2D g, std::vector<double> v);
  explicit JointDensity(Grid2D g) : JointDensity(g, std::vector<double>(g.size(), 0.0)) {}

  double& at(std::size_t i, std::size_t j) noexcept { return values[grid.index(i, j)]; }
  double at(std::size_t i, std::size_t j) const noexcept { return values[grid.index(i, j)]; }
  double mass() const noexcept;
};

/// Images of the n+1 cell edges under a monotone map. Cell c is carried onto
/// [edge_images[c], edge_images[c+1]].
struct MonotoneMap {
  Grid1D grid;
  std::vector<double> edge_images;

  static MonotoneMap identity(const Grid1D& grid);
  static MonotoneMap from_function(const Grid1D& grid, const std::function<double(double)>& theta);
  /// Builds edge images from displacements sampled at cell centers: interior edges
  /// take the average of the two neighbouring displacements, boundary edges the
  /// displacement of their only neighbour.
  static MonotoneMap from_cell_displacement(const Grid1D& grid, std::span<const double> displacement);
};

struct NormalizeResult {
  Density density;
  bool clamped = false;           // true if any negative entry was zeroed
  std::size_t clamped_cells = 0;
};

double mass(const Density& u) noexcept;
double mass(const Grid1D& grid, std::span<const double> values) noexcept;
double second_moment(const Density& u) noexcept;

NormalizeResult normalize(std::span<const double> raw, const Grid1D& grid);

/// Cumulative mass at the n+1 cell edges (0 at x_min, total mass at x_max).
std::vector<double> cdf_at_edges(const Density& u);

/// Right-continuous inverse of the piecewise-linear CDF: inf{x : F(x) > m}.
/// `cdf` must be the output of cdf_at_edges for the same grid.
double inverse_cdf(const Grid1D& grid, std::span<const double> values, std::span<const double> cdf, double m);

/// Piecewise-linear CDF evaluated at an arbitrary point.
double cdf_at(const Grid1D& grid, std::span<const double> values, std::span<const double> cdf, double x);

/// Inverse-CDF samples at levels (l + 1/2) / L. L = 0 selects L = n_cells.
QuantileMap to_quantiles(const Density& u, std::size_t L = 0);

/// Reconstructs a density from quantile positions: mass 1/L is spread uniformly
/// between consecutive positions (half levels at both ends, extrapolated with
/// the neighbouring spacing and clipped to the domain) and the resulting
/// piecewise-constant density is deposited into cells with linear (hat) weights.
Density to_density(const QuantileMap& q, const Grid1D& grid);

/// Push-forward theta#u: every cell's mass is spread uniformly over the image
/// of the cell and deposited area-weighted. Mass is conserved exactly.
Density pushforward_1d(const Density& u, const MonotoneMap& theta);

}  // namespace wgf
