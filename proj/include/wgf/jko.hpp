#pragma once

// Minimizing-movement (JKO) steps u^{k+1} = argmin W2²(u^k, u)/(2 tau) + E(u)
// for E(u) = ½ Σ_ij a_ij ∫ u_i u_j, with a Lagrangian (quantile) solver and an
// entropic (Sinkhorn-type) Eulerian solver.

#include <cstddef>
#include <vector>

#include "wgf/diagnostics.hpp"
#include "wgf/energies.hpp"
#include "wgf/measures.hpp"

namespace wgf {

struct JKOSchedule {
  std::vector<double> tau;

  static JKOSchedule uniform(double tau, std::size_t steps);
  double horizon() const noexcept;
  double sup() const noexcept;
  void validate() const;
};

struct JKOOptions {
  std::size_t levels = 0;            // quantile levels L; 0 selects n_cells
  double tol_obj = 1e-10;            // relative objective decrease that stops the inner loop
  std::size_t max_iter = 5000;
  std::size_t fixed_iterations = 0;  // > 0: run exactly this many inner iterations
  bool with_dirichlet = false;       // add ½ Σ ∫|∇u_i|² to the energy (Lagrangian solver only)

  double epsilon = 1e-3;             // entropic regularization
  double tol_fix = 1e-9;             // L¹ change between outer sweeps
  std::size_t max_outer = 2000;

  double support_threshold = 1e-8;   // residual support: u > support_threshold / h
  bool compute_residual = true;
};

struct JKOStepReport {
  double w2_increment = 0.0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  double objective_before = 0.0;
  double objective_after = 0.0;
  std::size_t inner_iterations = 0;
  std::vector<double> optimality_residual;  // per species
  bool converged = false;
};

/// Per-species quantile knots; the density is their deposition on the grid.
struct LagrangianState {
  Grid1D grid;
  std::vector<QuantileMap> knots;

  static LagrangianState from_density(const DensityVector& u, std::size_t levels = 0);
  DensityVector density() const;
  std::size_t levels() const noexcept { return knots.empty() ? 0 : knots.front().levels(); }
};

struct LagrangianStep {
  LagrangianState state;
  DensityVector u;
  JKOStepReport report;
};

LagrangianStep jko_step_lagrangian(const LagrangianState& prev, const CouplingMatrix& A, double tau,
                                   const JKOOptions& opts = {});

/// Convenience overload: starts from the quantiles of u_prev.
std::pair<DensityVector, JKOStepReport> jko_step_lagrangian(const DensityVector& u_prev, const CouplingMatrix& A,
                                                            double tau, const JKOOptions& opts = {});

std::pair<DensityVector, JKOStepReport> jko_step_entropic(const DensityVector& u_prev, const CouplingMatrix& A,
                                                          double tau, double epsilon, const JKOOptions& opts = {});

struct ResidualReport {
  std::vector<double> residual;                // per species, normalized std on the support
  std::vector<double> constant;                // per species, mean of phi/tau + p on the support
  std::vector<std::size_t> off_support_violations;
  double worst_off_support = 0.0;              // most negative (value − C) seen off the support
};

/// Residual of phi_i/tau + p_i(u_next) = C_i on supp(u_next,i), with phi_i the
/// potential of the map from u_next back to u_prev.
ResidualReport optimality_residual(const DensityVector& u_prev, const DensityVector& u_next, const CouplingMatrix& A,
                                   double tau, double support_threshold = 1e-8);

enum class JKOSolver { Lagrangian, Entropic };

struct JKORun {
  std::vector<DensityVector> trajectory;  // trajectory[0] is the represented initial state
  std::vector<JKOStepReport> steps;
  RunRecord record;
};

/// Iterates the chosen step over the schedule, fills the record (E, H, W2,
/// residuals, ‖∇u‖²) and appends the four estimate checks.
JKORun run_jko(const DensityVector& u0, const CouplingMatrix& A, const JKOSchedule& schedule, JKOSolver solver,
               const JKOOptions& opts = {});

}  // namespace wgf
