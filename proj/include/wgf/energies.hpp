#pragma once

// Lyapunov functionals of the cross-diffusion system and the linear pressures
// p_i = Σ_j a_ij u_j. Integrals are midpoint sums over cells.

#include <cstddef>
#include <vector>

#include "wgf/measures.hpp"

namespace wgf {

class CouplingMatrix {
 public:
  /// Row-major N x N entries. The smallest eigenvalue of the symmetric part is
  /// computed once here by cyclic Jacobi rotations.
  CouplingMatrix(std::size_t n, std::vector<double> entries);

  static CouplingMatrix identity(std::size_t n);
  /// a_ij = 1/N for all i, j (rank one, lambda_min = 0).
  static CouplingMatrix uniform(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }
  const std::vector<double>& entries() const noexcept { return a_; }
  bool symmetric() const noexcept { return symmetric_; }
  double lambda_min() const noexcept { return lambda_min_; }
  bool positive_definite() const noexcept { return lambda_min_ > 0.0; }

  /// B with b_ij = a_{perm[i], perm[j]}, the matrix seen after relabeling species.
  CouplingMatrix permuted(const std::vector<std::size_t>& perm) const;

 private:
  std::size_t n_;
  std::vector<double> a_;
  bool symmetric_;
  double lambda_min_;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi, ascending.
std::vector<double> symmetric_eigenvalues(std::size_t n, std::vector<double> a);

struct EnergyReport {
  double e_quadratic = 0.0;
  double h_boltzmann = 0.0;
  double e_dirichlet = 0.0;
};

/// ½ h Σ_c Σ_ij a_ij u_i(c) u_j(c).
double energy_quadratic(const DensityVector& u, const CouplingMatrix& A);

/// Σ_i h Σ_c u_i (log u_i − 1); cells below 1e-300 contribute 0.
double entropy_boltzmann(const DensityVector& u);

/// ½ Σ_i h Σ_interfaces ((u_{c+1} − u_c)/h)². Boundary interfaces see a mirror
/// ghost cell and contribute nothing.
double energy_dirichlet(const DensityVector& u);

/// Σ_i h Σ_c ((u_{c+1} − u_{c−1})/(2h))², cell-centered with mirror ghosts.
double gradient_norm_sq(const DensityVector& u);

EnergyReport energy_report(const DensityVector& u, const CouplingMatrix& A);

/// p_i(c) = Σ_j a_ij u_j(c).
std::vector<std::vector<double>> pressure(const DensityVector& u, const CouplingMatrix& A);

}  // namespace wgf
