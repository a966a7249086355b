#include "wgf/transport1d.hpp"

#include <algorithm>
#include <cmath>

#include "wgf/error.hpp"
#include "wgf/kernels.hpp"

namespace wgf {

std::vector<double> TransportMap::displacement() const {
  std::vector<double> d(at_centers.size());
  for (std::size_t c = 0; c < d.size(); ++c) d[c] = at_centers[c] - grid.center(c);
  return d;
}

std::vector<double> PotentialField::interface_gradient() const {
  std::vector<double> g(values.size() - 1);
  const double inv_h = 1.0 / grid.h();
  for (std::size_t c = 0; c + 1 < values.size(); ++c) g[c] = (values[c + 1] - values[c]) * inv_h;
  return g;
}

namespace {

void require_same_grid(const Density& u, const Density& v) {
  require(u.grid == v.grid, ErrorKind::DimensionMismatch, "densities live on different grids");
}

}  // namespace

double w2_exact(const Density& u, const Density& v) {
  require_same_grid(u, v);
  const Grid1D& g = u.grid;
  const std::size_t n = g.n_cells();
  const double h = g.h();
  std::size_t i = 0;
  std::size_t j = 0;
  double ra = u.values[0] * h;
  double rb = v.values[0] * h;
  double cost = 0.0;
  while (i < n && j < n) {
    if (ra <= 0.0) {
      if (++i < n) ra = u.values[i] * h;
      continue;
    }
    if (rb <= 0.0) {
      if (++j < n) rb = v.values[j] * h;
      continue;
    }
    const double t = std::min(ra, rb);
    const double d = g.center(i) - g.center(j);
    cost += t * d * d;
    ra -= t;
    rb -= t;
    if (ra <= 0.0 && i < n) {
      if (++i < n) ra = u.values[i] * h;
    }
    if (rb <= 0.0 && j < n) {
      if (++j < n) rb = v.values[j] * h;
    }
  }
  return std::sqrt(std::max(cost, 0.0));
}

double w2_quantile(const QuantileMap& x, const QuantileMap& y) {
  require(x.levels() == y.levels() && x.levels() > 0, ErrorKind::DimensionMismatch, "quantile maps differ in levels");
  const double s = kernels::sum_sq_diff(x.positions.data(), y.positions.data(), x.levels());
  return std::sqrt(s / static_cast<double>(x.levels()));
}

double w2_quantile(const Density& u, const Density& v, std::size_t L) {
  require_same_grid(u, v);
  return w2_quantile(to_quantiles(u, L), to_quantiles(v, L));
}

double w2_product(const DensityVector& u, const DensityVector& v) {
  require(u.n_species() == v.n_species(), ErrorKind::DimensionMismatch, "species counts differ");
  require(u.grid == v.grid, ErrorKind::DimensionMismatch, "density vectors live on different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < u.n_species(); ++i) {
    const double d = w2_exact(u.component(i), v.component(i));
    s += d * d;
  }
  return std::sqrt(s);
}

TransportMap optimal_map_1d(const Density& u, const Density& v) {
  require_same_grid(u, v);
  const Grid1D& g = u.grid;
  const auto Fu = cdf_at_edges(u);
  const auto Fv = cdf_at_edges(v);
  require(Fu.back() > 0.0, ErrorKind::DegenerateSupport, "source density has no mass");
  require(Fv.back() > 0.0, ErrorKind::DegenerateSupport, "target density has no mass");
  const double scale = Fv.back() / Fu.back();
  const std::size_t n = g.n_cells();
  TransportMap T{g, std::vector<double>(n + 1), std::vector<double>(n)};
  // the CDF of v is flat beyond its support; levels at or above its total map to its right end
  const double right_end = inverse_cdf(g, v.values, Fv, std::nextafter(Fv.back(), 0.0));
  for (std::size_t e = 0; e <= n; ++e) {
    T.at_edges[e] = std::min(inverse_cdf(g, v.values, Fv, Fu[e] * scale), right_end);
  }
  T.at_edges[n] = right_end;
  for (std::size_t c = 0; c < n; ++c) {
    const double m = 0.5 * (Fu[c] + Fu[c + 1]) * scale;
    T.at_centers[c] = std::min(inverse_cdf(g, v.values, Fv, m), right_end);
  }
  for (std::size_t e = 1; e <= n; ++e) T.at_edges[e] = std::max(T.at_edges[e], T.at_edges[e - 1]);
  return T;
}

PotentialField kantorovich_potential_1d(const Density& u, const Density& v) {
  const TransportMap T = optimal_map_1d(u, v);
  const Grid1D& g = u.grid;
  const std::size_t n = g.n_cells();
  PotentialField phi{g, std::vector<double>(n, 0.0), std::vector<double>(n)};
  for (std::size_t c = 0; c < n; ++c) phi.gradient[c] = g.center(c) - T.at_centers[c];

  std::size_t anchor = 0;
  while (anchor < n && !(u.values[anchor] > 0.0)) ++anchor;
  if (anchor == n) raise(ErrorKind::DegenerateSupport, "source density has no support");

  const double half_h = 0.5 * g.h();
  for (std::size_t c = anchor + 1; c < n; ++c) {
    phi.values[c] = phi.values[c - 1] + half_h * (phi.gradient[c - 1] + phi.gradient[c]);
  }
  for (std::size_t c = anchor; c-- > 0;) {
    phi.values[c] = phi.values[c + 1] - half_h * (phi.gradient[c + 1] + phi.gradient[c]);
  }
  return phi;
}

double potential_cost(const PotentialField& phi, const Density& u) {
  require(phi.grid == u.grid, ErrorKind::DimensionMismatch, "potential and density live on different grids");
  double s = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) s += phi.gradient[c] * phi.gradient[c] * u.values[c];
  return s * u.grid.h();
}

}  // namespace wgf
