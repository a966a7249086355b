#pragma once

// One-dimensional optimal transport with quadratic cost: distances, the
// monotone rearrangement T = V^{-1} o U and its Kantorovich potential.

#include <cstddef>
#include <vector>

#include "wgf/measures.hpp"

namespace wgf {

/// Monotone transport map sampled at cell edges (n+1 values) and centers (n values).
struct TransportMap {
  Grid1D grid;
  std::vector<double> at_edges;
  std::vector<double> at_centers;

  MonotoneMap as_monotone_map() const { return {grid, at_edges}; }
  /// T(x_c) − x_c per cell.
  std::vector<double> displacement() const;
};

/// Potential phi with grad phi = x − T(x); values anchored to 0 at the leftmost support cell.
struct PotentialField {
  Grid1D grid;
  std::vector<double> values;    // per cell
  std::vector<double> gradient;  // per cell, x_c − T(x_c)

  /// (phi_{c+1} − phi_c)/h on the n−1 interior interfaces.
  std::vector<double> interface_gradient() const;
};

/// Exact squared-cost transport between the cell-center atoms of u and v
/// (masses h·u_c, h·v_c), solved by the monotone north-west-corner coupling,
/// which is optimal for costs |x − y|² on the line.
double w2_exact(const Density& u, const Density& v);

/// Quantile-sample distance sqrt((1/L) Σ_l (X_l − Y_l)²) with X, Y from
/// to_quantiles. L = 0 selects L = n_cells.
double w2_quantile(const Density& u, const Density& v, std::size_t L = 0);

/// Same distance on already sampled quantile maps.
double w2_quantile(const QuantileMap& x, const QuantileMap& y);

/// Root of the summed per-species squared w2_exact distances.
double w2_product(const DensityVector& u, const DensityVector& v);

TransportMap optimal_map_1d(const Density& u, const Density& v);

PotentialField kantorovich_potential_1d(const Density& u, const Density& v);

/// h Σ_c |grad phi_c|² u_c, the potential's transport cost against u.
double potential_cost(const PotentialField& phi, const Density& u);

}  // namespace wgf
