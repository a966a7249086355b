#pragma once

// Run records and the pass/fail checks of the discrete a-priori estimates.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "wgf/measures.hpp"

namespace wgf {

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // distance to failure; negative when failing
  double tolerance = 0.0;
  std::string detail;
};

struct RunRecord {
  std::vector<double> times;                           // t_0 = 0, t_1, ...
  std::vector<double> tau;                             // step sizes, one per step
  std::vector<double> energy;                          // per time
  std::vector<double> entropy;                         // per time
  std::vector<double> grad_norm_sq;                    // per time, Σ_i ‖∇u_i‖²
  std::vector<double> w2_increment;                    // per step
  std::map<std::string, std::vector<double>> tv;       // per time, by field name
  std::vector<std::vector<double>> residual;           // per step, per species
  std::map<std::string, std::string> notes;
  std::vector<CheckResult> checks;

  /// Difference quotients W2(u^k, u^{k+1}) / tau_k.
  std::vector<double> metric_speed() const;
  bool all_pass() const;
};

/// E(k+1) <= E(k) + 1e-8 |E(0)| for all k.
CheckResult check_energy_monotone(const RunRecord& record);

/// Σ_k W2²(u^k, u^{k+1}) / (2 tau_k) <= E0 + tol, tol = 1e-8 max(|E0|, 1).
CheckResult check_telescoped_w2(const RunRecord& record, double E0);

/// True pairwise W2(u(s), u(t)) <= sqrt(2 E0 (t − s)) + tol on at most `max_pairs`
/// index pairs chosen with a deterministic stride; tol = 1e-6 + 2(h + 1/L).
CheckResult check_hoelder(const RunRecord& record, double E0, const std::vector<DensityVector>& trajectory,
                          std::size_t levels, std::size_t max_pairs = 50);

/// H(u^0) − H(u^k) >= C Σ_{l<=k} tau_{l−1} ‖∇u^l‖² − tol for every k, with
/// tol = 1e-6 |H(u^0)| + h · C Σ tau ‖∇u‖² (first-order slack of the discrete gradient).
CheckResult check_entropy_dissipation(const RunRecord& record, double C, double h);

/// Named TV series nonincreasing within 1e-8 · TV(0). Throws UnknownField.
CheckResult check_tv_monotone(const RunRecord& record, const std::string& field);

/// W2(u^k, u^{k+1}) <= sqrt(N) W2(p_k, p_{k+1}) + tol at every step.
CheckResult check_metric_speed(const RunRecord& species, const RunRecord& pressure, std::size_t n_species, double tol = 1e-8);

/// Step indices 0 = i_0 < ... used by check_hoelder, exposed for tests.
std::vector<std::pair<std::size_t, std::size_t>> hoelder_pairs(std::size_t n_times, std::size_t max_pairs);

}  // namespace wgf
