#pragma once

// Hyperbolic-parabolic system d_t u_i = d_x(u_i d_x p), p = (1/N) Σ_j u_j, in the
// variables (p, r): d_t p = d_x(p d_x p), d_t r = d_x p d_x r.

#include <cstddef>
#include <span>
#include <vector>

#include "wgf/diagnostics.hpp"
#include "wgf/measures.hpp"

namespace wgf {

/// p and the fractions r_i = u_i / (N p) of species 0..N−2; the last fraction is 1 − Σ r_i.
struct PressureFraction {
  Grid1D grid;
  std::vector<double> p;
  std::vector<std::vector<double>> r;

  std::size_t n_species() const noexcept { return r.size() + 1; }
  /// Fraction of species i, including the implied last one (0 where p = 0).
  std::vector<double> fraction(std::size_t i) const;
};

PressureFraction split_state(const DensityVector& u);
DensityVector recover_species(const PressureFraction& pf);

/// Largest admissible explicit step: min(½ h²/max p, h / max_c(|d_x p|_{c−½} + |d_x p|_{c+½})).
double cfl_splitting(const PressureFraction& pf);

/// One explicit step: conservative p-flux ½(p_c + p_{c+1})(p_{c+1} − p_c)/h, species carried
/// with the upwind fraction. Raises CFLViolation above cfl_splitting.
PressureFraction step_splitting(const PressureFraction& pf, double dt);

/// Σ_c |g_{c+1} − g_c|.
double tv(std::span<const double> field);

/// Total variation of `field` along the cells where p > 0, skipping vacuum cells.
double tv_on_support(std::span<const double> field, std::span<const double> p);

/// Pushes every species along the monotone transport plan from p_prev to p_next.
/// Raises CheckFailed if π(u_prev) differs from p_prev by more than 1e-9.
DensityVector pressure_transport_step(const DensityVector& u_prev, const Density& p_prev, const Density& p_next);

/// π(u) = (1/N) Σ_i u_i.
Density mean_pressure(const DensityVector& u);

enum class HyperbolicScheme { Splitting, PressureTransport };

struct HyperbolicOptions {
  HyperbolicScheme scheme = HyperbolicScheme::Splitting;
  double t_final = 0.1;
  double dt = 0.0;           // 0 selects safety · cfl_splitting at every step
  double safety = 0.5;
  std::size_t snapshots = 10;  // equally spaced output times after t = 0
};

struct HyperbolicRun {
  std::vector<double> output_times;
  std::vector<DensityVector> trajectory;  // species at the output times
  std::vector<Density> pressure;          // p at the output times
  RunRecord record;                       // per step: tau, TV(p), TV(r_i), W2 of u
  RunRecord pressure_record;              // per step: W2 of p
  std::size_t steps = 0;
};

/// Runs either scheme to t_final and appends the checks: TV(p) and TV(r_i)
/// nonincreasing, 0 <= r <= 1, species masses kept, and the metric-speed bound
/// for the pressure-transport scheme.
HyperbolicRun run_hyperbolic(const DensityVector& u0, const HyperbolicOptions& opts);

/// Number of cells where at least two species exceed `threshold`.
std::size_t support_overlap(const DensityVector& u, double threshold = 1e-12);

}  // namespace wgf
