#pragma once

// Correlated two-particle joint density d_t p = div(M(|x1 − x2|) p ∇p) on a
// rectangle, its marginals and relative entropy, and the decoupled nonlocal
// system for the marginals.

#include <cstddef>
#include <optional>
#include <vector>

#include "wgf/diagnostics.hpp"
#include "wgf/measures.hpp"

namespace wgf {

/// Cell values M(|x1_i − x2_j|) with M(s) = c_M + Z exp(−s² / (2σ²)).
struct MobilityField {
  Grid2D grid;
  std::vector<double> values;
  double sigma = 0.0;
  double floor = 0.0;      // c_M
  double amplitude = 0.0;  // Z
  double lower = 0.0;      // min over cells
  double upper = 0.0;      // max over cells

  double at(std::size_t i, std::size_t j) const noexcept { return values[grid.index(i, j)]; }
};

/// Z = 1 / (σ sqrt(2π)), so that M − c_M integrates to one along a line.
MobilityField build_mobility(const Grid2D& grid, double sigma, double floor);
/// Same profile with an explicit amplitude; amplitude 0 gives M ≡ floor.
MobilityField build_mobility(const Grid2D& grid, double sigma, double floor, double amplitude);

/// ¼ min(h1, h2)² / max(M p); +inf when M p vanishes.
double cfl_joint(const JointDensity& p, const MobilityField& M);

/// Conservative explicit step with interface flux M̄ p̄ ∂p (arithmetic averages) and
/// no-flux walls. Raises CFLViolation above cfl_joint and NegativityDetected if a
/// cell turns negative.
JointDensity step_joint_fd(const JointDensity& p, const MobilityField& M, double dt);

struct MarginalPair {
  Density u1;  // on axis 1
  Density u2;  // on axis 2
};

MarginalPair marginals(const JointDensity& p);

/// h1 h2 Σ p log(p / (u1 u2)) over cells with p > 0; the product is floored at 1e-300.
double relative_entropy(const JointDensity& p);

/// u1 ⊗ u2 on the product grid.
JointDensity product_density(const Density& u1, const Density& u2);

/// Gaussian with variance `variance` along each axis centered at (c1, c2), truncated to the grid
/// and renormalized to unit mass.
JointDensity gaussian_product(const Grid2D& grid, double c1, double c2, double variance);

struct SktScenario {
  Grid2D grid{Grid1D(128, -5.0, 5.0), Grid1D(128, -5.0, 5.0)};
  double center1 = -2.0;
  double center2 = 2.0;
  double variance = 0.15;
  double sigma = 0.3;
  double floor = 1e-3;
  std::optional<double> amplitude;  // unset selects 1 / (σ sqrt(2π))
  double t_final = 1.0;
  double dt = 0.0;       // 0 selects cfl_joint at every step
  double safety = 1.0;   // multiplies cfl_joint
  std::size_t snapshots = 10;
  double contact_mass = 1e-4;  // contact once the band |x1 − x2| < 2σ holds this much mass
};

struct SktRun {
  std::vector<double> output_times;
  std::vector<JointDensity> snapshots;
  std::vector<MarginalPair> marginals;
  RunRecord record;  // per time: entropy = relative entropy; per step: tau
  std::vector<double> band_mass;  // per time
  std::optional<double> contact_time;
  std::size_t steps = 0;
};

/// Mass of p in the band |x1 − x2| < width (cell centers).
double band_mass(const JointDensity& p, double width);

/// Runs the joint equation from a product Gaussian and appends the checks: initial entropy
/// at most 1e-6, final entropy above 10 times the initial one, entropy nondecreasing within
/// 1e-9 per step after contact, and mass kept to 1e-10.
SktRun run_skt_scenario(const SktScenario& scenario);

enum class DecoupledVariant { Quadratic, Entropy };

/// a_1(x) = h2 Σ_y M(x, y) u2(y)^q and a_2(y) = h1 Σ_x M(x, y) u1(x)^q, q = 2 or 1.
std::pair<std::vector<double>, std::vector<double>> nonlocal_coefficients(const MarginalPair& u,
                                                                          const MobilityField& M,
                                                                          DecoupledVariant variant);

/// ¼ h² / max(a u) (quadratic) or ¼ h² / max(a) (entropy), minimized over both species.
double cfl_decoupled(const MarginalPair& u, const MobilityField& M, DecoupledVariant variant);

/// One explicit step of d_t u1 = d_x(u1 a_1 d_x u1) (quadratic) or d_t u1 = d_x(a_1 d_x u1)
/// (entropy), and symmetrically for u2, with the coefficients frozen at the old state.
MarginalPair step_decoupled_fd(const MarginalPair& u, const MobilityField& M, double dt, DecoupledVariant variant);

struct CompareReport {
  std::vector<double> times;
  std::vector<double> gap;  // L¹ gap between joint marginals and decoupled species, summed over both
  std::vector<double> entropy;
  CheckResult initial_gap;
};

/// Runs both models from the same product initialization to the scenario's output times.
CompareReport compare_correlated_vs_decoupled(const SktScenario& scenario,
                                              DecoupledVariant variant = DecoupledVariant::Quadratic);

}  // namespace wgf
