#pragma once

// Explicit finite-volume reference solvers and closed-form oracles.

#include <cstddef>
#include <span>
#include <vector>

#include "wgf/energies.hpp"
#include "wgf/measures.hpp"

namespace wgf {

/// Source-type solution of ∂t u = ½ ∂xx(u²) = ∂x(u ∂x u):
///   u(t, x) = t^{-1/3} (A − (x − x0)² / (6 t^{2/3}))_+,   mass = (4/3) A sqrt(6A).
struct Barenblatt {
  double mass = 1.0;
  double center = 0.0;

  double A() const noexcept;
  double value(double t, double x) const;
  double time_derivative(double t, double x) const;
  double half_width(double t) const;
  /// Time at which the peak height equals `height`.
  double time_for_height(double height) const;
};

/// Cell averages of the Barenblatt profile (exact cell integrals).
Density barenblatt(double t, const Grid1D& grid, double mass = 1.0, double center = 0.0);

/// Cell averages of the heat kernel of ∂t u = D ∂xx u started from a point mass at x0.
Density heat_kernel(double t, const Grid1D& grid, double diffusivity, double mass = 1.0, double center = 0.0);

struct OracleProfile {
  enum class Kind { Barenblatt, HeatKernel };
  Kind kind = Kind::Barenblatt;
  double onset = 0.0;  // added to the requested time
  double mass = 1.0;
  double diffusivity = 1.0;
  double center = 0.0;

  Density evaluate(double t, const Grid1D& grid) const;
};

/// Largest stable step of step_bt_fd: ½ h² / max_i max_c |p_i|.
double cfl_bt_fd(const DensityVector& u, const CouplingMatrix& A);

/// One explicit conservative step of ∂t u_i = ∂x(u_i ∂x p_i) with interface
/// flux ū_i (p_{i,c+1} − p_{i,c}) / h and no-flux boundaries.
DensityVector step_bt_fd(const DensityVector& u, const CouplingMatrix& A, double dt);

/// min(h⁴ / (8 max u), ½ h² / max |p|).
double cfl_bt4_fd(const DensityVector& u, const CouplingMatrix& A);

/// One explicit step of ∂t u_i = ∂x(u_i ∂x(p_i − ∂xx u_i)), the flow decreasing
/// energy_quadratic + energy_dirichlet. Mirror ghosts give ∂x u = ∂x ∂xx u = 0 at the walls.
DensityVector step_bt4_fd(const DensityVector& u, const CouplingMatrix& A, double dt);

struct FdRun {
  std::vector<double> times;
  std::vector<DensityVector> snapshots;  // at `times`
  std::vector<double> energy;            // per accepted step, including t = 0
  std::size_t steps = 0;
};

/// Advances step_bt_fd from t = 0 to each requested output time (ascending),
/// using dt = safety · cfl each step and shortening the last step to land exactly.
FdRun run_bt_fd(const DensityVector& u0, const CouplingMatrix& A, std::span<const double> output_times, double safety = 0.5);

/// Fixed-step run of step_bt4_fd; records energy_quadratic + energy_dirichlet after every step.
FdRun run_bt4_fd(const DensityVector& u0, const CouplingMatrix& A, double dt, std::size_t steps);

double l1_error(std::span<const double> a, std::span<const double> b, double h);
double l1_error(const Density& a, const Density& b);
double linf_error(std::span<const double> a, std::span<const double> b);
double linf_error(const Density& a, const Density& b);

}  // namespace wgf
