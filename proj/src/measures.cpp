#include "wgf/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wgf/error.hpp"

namespace wgf {

Grid1D::Grid1D(std::size_t n_cells, double x_min, double x_max) : n_(n_cells), x_min_(x_min), x_max_(x_max) {
  require(n_cells >= 2, ErrorKind::InvalidArgument, "grid needs at least 2 cells");
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min, ErrorKind::InvalidArgument,
          "grid requires x_min < x_max");
  h_ = (x_max - x_min) / static_cast<double>(n_cells);
}

std::size_t Grid1D::locate(double x) const noexcept {
  const double s = std::floor((x - x_min_) / h_);
  if (!(s > 0.0)) return 0;
  const auto c = static_cast<std::size_t>(s);
  return std::min(c, n_ - 1);
}

Density::Density(Grid1D g, std::vector<double> v) : grid(g), values(std::move(v)) {
  require(values.size() == grid.n_cells(), ErrorKind::DimensionMismatch,
          "density has " + std::to_string(values.size()) + " values for " + std::to_string(grid.n_cells()) + " cells");
}

DensityVector::DensityVector(Grid1D g, std::vector<std::vector<double>> s) : grid(g), species(std::move(s)) {
  for (const auto& v : species) {
    require(v.size() == grid.n_cells(), ErrorKind::DimensionMismatch, "species length differs from grid size");
  }
}

void DensityVector::set_component(std::size_t i, const Density& d) {
  require(d.grid == grid, ErrorKind::DimensionMismatch, "component grid differs");
  species.at(i) = d.values;
}

bool QuantileMap::is_monotone() const noexcept {
  return std::is_sorted(positions.begin(), positions.end());
}

JointDensity::JointDensity(Grid2D g, std::vector<double> v) : grid(g), values(std::move(v)) {
  require(values.size() == grid.size(), ErrorKind::DimensionMismatch, "joint density size differs from grid");
}

double JointDensity::mass() const noexcept {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.h1() * grid.h2();
}

MonotoneMap MonotoneMap::identity(const Grid1D& grid) {
  return from_function(grid, [](double x) { return x; });
}

MonotoneMap MonotoneMap::from_function(const Grid1D& grid, const std::function<double(double)>& theta) {
  std::vector<double> img(grid.n_cells() + 1);
  for (std::size_t e = 0; e <= grid.n_cells(); ++e) img[e] = theta(grid.edge(e));
  return {grid, std::move(img)};
}

MonotoneMap MonotoneMap::from_cell_displacement(const Grid1D& grid, std::span<const double> displacement) {
  const std::size_t n = grid.n_cells();
  require(displacement.size() == n, ErrorKind::DimensionMismatch, "displacement length differs from grid size");
  std::vector<double> img(n + 1);
  img[0] = grid.edge(0) + displacement[0];
  img[n] = grid.edge(n) + displacement[n - 1];
  for (std::size_t e = 1; e < n; ++e) img[e] = grid.edge(e) + 0.5 * (displacement[e - 1] + displacement[e]);
  return {grid, std::move(img)};
}

double mass(const Grid1D& grid, std::span<const double> values) noexcept {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.h();
}

double mass(const Density& u) noexcept { return mass(u.grid, u.values); }

double second_moment(const Density& u) noexcept {
  double s = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    const double x = u.grid.center(c);
    s += x * x * u.values[c];
  }
  return s * u.grid.h();
}

NormalizeResult normalize(std::span<const double> raw, const Grid1D& grid) {
  require(raw.size() == grid.n_cells(), ErrorKind::DimensionMismatch, "raw values do not match the grid");
  NormalizeResult out{Density(grid), false, 0};
  double total = 0.0;
  for (std::size_t c = 0; c < raw.size(); ++c) {
    double v = raw[c];
    if (v < 0.0) {
      v = 0.0;
      out.clamped = true;
      ++out.clamped_cells;
    }
    out.density.values[c] = v;
    total += v;
  }
  total *= grid.h();
  if (!(total > 0.0)) raise(ErrorKind::AllZero, "every entry is nonpositive");
  for (double& v : out.density.values) v /= total;
  return out;
}

std::vector<double> cdf_at_edges(const Density& u) {
  std::vector<double> F(u.size() + 1, 0.0);
  const double h = u.grid.h();
  for (std::size_t c = 0; c < u.size(); ++c) F[c + 1] = F[c] + h * u.values[c];
  return F;
}

double inverse_cdf(const Grid1D& grid, std::span<const double> values, std::span<const double> cdf, double m) {
  const std::size_t n = grid.n_cells();
  // smallest c with F_{c+1} > m
  const auto it = std::upper_bound(cdf.begin() + 1, cdf.end(), m);
  if (it == cdf.end()) return grid.x_max();
  const auto c = static_cast<std::size_t>(it - cdf.begin()) - 1;
  if (c >= n) return grid.x_max();
  const double frac = (m - cdf[c]) / (values[c] * grid.h());
  return grid.edge(c) + std::clamp(frac, 0.0, 1.0) * grid.h();
}

double cdf_at(const Grid1D& grid, std::span<const double> values, std::span<const double> cdf, double x) {
  if (x <= grid.x_min()) return 0.0;
  if (x >= grid.x_max()) return cdf.back();
  const std::size_t c = grid.locate(x);
  return cdf[c] + (x - grid.edge(c)) * values[c];
}

QuantileMap to_quantiles(const Density& u, std::size_t L) {
  if (L == 0) L = u.size();
  const auto F = cdf_at_edges(u);
  const double total = F.back();
  require(total > 0.0, ErrorKind::AllZero, "density has zero mass");
  QuantileMap q;
  q.positions.resize(L);
  const double h = u.grid.h();
  std::size_t c = 0;
  for (std::size_t l = 0; l < L; ++l) {
    const double m = total * (static_cast<double>(l) + 0.5) / static_cast<double>(L);
    while (c + 1 < u.size() && !(F[c + 1] > m)) ++c;
    double frac = u.values[c] > 0.0 ? (m - F[c]) / (u.values[c] * h) : 1.0;
    frac = std::clamp(frac, 0.0, 1.0);
    q.positions[l] = u.grid.edge(c) + frac * h;
  }
  return q;
}

namespace {

// Adds mass w, spread uniformly on [a, b], to cells through the hat functions
// phi_c (linear between neighbouring centers, flat on the outer half cells).
void deposit_interval(const Grid1D& g, double a, double b, double w, std::vector<double>& cell_mass) {
  const std::size_t n = g.n_cells();
  const double h = g.h();
  if (!(b > a)) {
    // point mass at a
    const double s = (a - g.x_min()) / h - 0.5;  // position in center coordinates
    if (s <= 0.0) {
      cell_mass[0] += w;
    } else if (s >= static_cast<double>(n - 1)) {
      cell_mass[n - 1] += w;
    } else {
      const auto k = static_cast<std::size_t>(s);
      const double t = s - static_cast<double>(k);
      cell_mass[k] += w * (1.0 - t);
      cell_mass[k + 1] += w * t;
    }
    return;
  }
  const double len = b - a;
  const double x0 = g.center(0);
  const double xl = g.center(n - 1);
  // left flat piece
  if (a < x0) {
    const double t = std::min(b, x0);
    cell_mass[0] += w * (t - a) / len;
  }
  if (b > xl) {
    const double s = std::max(a, xl);
    cell_mass[n - 1] += w * (b - s) / len;
  }
  const double lo = std::max(a, x0);
  const double hi = std::min(b, xl);
  if (!(hi > lo)) return;
  auto k = static_cast<std::size_t>(std::clamp(std::floor((lo - x0) / h), 0.0, static_cast<double>(n - 2)));
  for (; k + 1 < n; ++k) {
    const double ck = g.center(k);
    const double s = std::max(lo, ck);
    const double t = std::min(hi, g.center(k + 1));
    if (t > s) {
      const double frac = (t - s) / len;
      // mean of (x - ck)/h over [s, t]
      const double right = (s + t - 2.0 * ck) / (2.0 * h);
      cell_mass[k + 1] += w * frac * right;
      cell_mass[k] += w * frac * (1.0 - right);
    }
    if (g.center(k + 1) >= hi) break;
  }
}

}  // namespace

Density to_density(const QuantileMap& q, const Grid1D& grid) {
  const std::size_t L = q.levels();
  require(L > 0, ErrorKind::InvalidArgument, "empty quantile map");
  const double slack = 1e-12 * grid.length();
  for (double x : q.positions) {
    require(grid.contains(x, slack), ErrorKind::OutOfDomain, "quantile position " + std::to_string(x) + " outside the grid");
  }
  require(q.is_monotone(), ErrorKind::NonMonotoneMap, "quantile positions must be nondecreasing");

  std::vector<double> cell_mass(grid.n_cells(), 0.0);
  const double w = 1.0 / static_cast<double>(L);
  const auto& X = q.positions;
  auto clip = [&grid](double x) { return std::clamp(x, grid.x_min(), grid.x_max()); };

  double a0 = clip(X[0]);
  double b1 = clip(X[L - 1]);
  if (L > 1) {
    a0 = clip(1.5 * X[0] - 0.5 * X[1]);
    b1 = clip(1.5 * X[L - 1] - 0.5 * X[L - 2]);
  }
  deposit_interval(grid, a0, clip(X[0]), 0.5 * w, cell_mass);
  for (std::size_t l = 0; l + 1 < L; ++l) deposit_interval(grid, clip(X[l]), clip(X[l + 1]), w, cell_mass);
  deposit_interval(grid, clip(X[L - 1]), b1, 0.5 * w, cell_mass);

  Density out(grid);
  const double inv_h = 1.0 / grid.h();
  for (std::size_t c = 0; c < grid.n_cells(); ++c) out.values[c] = cell_mass[c] * inv_h;
  return out;
}

Density pushforward_1d(const Density& u, const MonotoneMap& theta) {
  const Grid1D& g = u.grid;
  const std::size_t n = g.n_cells();
  require(theta.edge_images.size() == n + 1, ErrorKind::DimensionMismatch, "map needs one image per cell edge");
  const auto& y = theta.edge_images;
  for (std::size_t e = 0; e < n; ++e) {
    if (y[e + 1] < y[e]) raise(ErrorKind::NonMonotoneMap, "edge images decrease at edge " + std::to_string(e));
  }
  const double slack = 1e-12 * g.length();
  const double h = g.h();
  std::vector<double> cell_mass(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    const double m = u.values[c] * h;
    if (m == 0.0) continue;
    if (y[c] < g.x_min() - slack || y[c + 1] > g.x_max() + slack) {
      raise(ErrorKind::OutOfDomain, "cell " + std::to_string(c) + " is mapped outside the grid");
    }
    const double a = std::clamp(y[c], g.x_min(), g.x_max());
    const double b = std::clamp(y[c + 1], g.x_min(), g.x_max());
    if (!(b > a)) {
      cell_mass[g.locate(a)] += m;
      continue;
    }
    const std::size_t k0 = g.locate(a);
    const std::size_t k1 = g.locate(b);
    if (k0 == k1) {
      cell_mass[k0] += m;
      continue;
    }
    const double len = b - a;
    double placed = 0.0;
    for (std::size_t k = k0; k < k1; ++k) {
      const double s = std::max(a, g.edge(k));
      const double t = g.edge(k + 1);
      const double part = m * ((t - s) / len);
      cell_mass[k] += part;
      placed += part;
    }
    cell_mass[k1] += m - placed;
  }
  Density out(g);
  for (std::size_t c = 0; c < n; ++c) out.values[c] = cell_mass[c] / h;
  return out;
}

}  // namespace wgf
