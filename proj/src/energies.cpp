#include "wgf/energies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wgf/error.hpp"

namespace wgf {

std::vector<double> symmetric_eigenvalues(std::size_t n, std::vector<double> a) {
  auto at = [&a, n](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

CouplingMatrix::CouplingMatrix(std::size_t n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
  require(n > 0, ErrorKind::InvalidArgument, "coupling matrix needs at least one species");
  require(a_.size() == n * n, ErrorKind::DimensionMismatch,
          "coupling matrix needs " + std::to_string(n * n) + " entries, got " + std::to_string(a_.size()));
  symmetric_ = true;
  std::vector<double> sym(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a_[i * n + j] != a_[j * n + i]) symmetric_ = false;
      sym[i * n + j] = 0.5 * (a_[i * n + j] + a_[j * n + i]);
    }
  }
  lambda_min_ = symmetric_eigenvalues(n, std::move(sym)).front();
  // rank-deficient matrices land on rounding noise around 0
  if (std::abs(lambda_min_) < 1e-14 * (1.0 + std::abs(a_[0]))) lambda_min_ = 0.0;
}

CouplingMatrix CouplingMatrix::identity(std::size_t n) {
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0;
  return {n, std::move(a)};
}

CouplingMatrix CouplingMatrix::uniform(std::size_t n) {
  return {n, std::vector<double>(n * n, 1.0 / static_cast<double>(n))};
}

CouplingMatrix CouplingMatrix::permuted(const std::vector<std::size_t>& perm) const {
  require(perm.size() == n_, ErrorKind::DimensionMismatch, "permutation length differs from species count");
  std::vector<double> b(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) b[i * n_ + j] = (*this)(perm[i], perm[j]);
  return {n_, std::move(b)};
}

namespace {

void require_match(const DensityVector& u, const CouplingMatrix& A) {
  require(u.n_species() == A.size(), ErrorKind::DimensionMismatch,
          "density has " + std::to_string(u.n_species()) + " species, matrix is " + std::to_string(A.size()) + "x" +
              std::to_string(A.size()));
}

}  // namespace

double energy_quadratic(const DensityVector& u, const CouplingMatrix& A) {
  require_match(u, A);
  const std::size_t N = u.n_species();
  double total = 0.0;
  for (std::size_t c = 0; c < u.grid.n_cells(); ++c) {
    double diag = 0.0;
    for (std::size_t i = 0; i < N; ++i) diag += A(i, i) * u.species[i][c] * u.species[i][c];
    double cross = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) cross += (A(i, j) + A(j, i)) * u.species[i][c] * u.species[j][c];
    total += diag + cross;
  }
  return 0.5 * u.grid.h() * total;
}

double entropy_boltzmann(const DensityVector& u) {
  double total = 0.0;
  for (const auto& s : u.species) {
    for (double v : s) {
      if (v > 1e-300) total += v * (std::log(v) - 1.0);
    }
  }
  return total * u.grid.h();
}

double energy_dirichlet(const DensityVector& u) {
  const double inv_h = 1.0 / u.grid.h();
  double total = 0.0;
  for (const auto& s : u.species) {
    for (std::size_t c = 0; c + 1 < s.size(); ++c) {
      const double d = (s[c + 1] - s[c]) * inv_h;
      total += d * d;
    }
  }
  return 0.5 * total * u.grid.h();
}

double gradient_norm_sq(const DensityVector& u) {
  const double inv_2h = 0.5 / u.grid.h();
  double total = 0.0;
  for (const auto& s : u.species) {
    const std::size_t n = s.size();
    for (std::size_t c = 0; c < n; ++c) {
      const double lo = c > 0 ? s[c - 1] : s[c];
      const double hi = c + 1 < n ? s[c + 1] : s[c];
      const double d = (hi - lo) * inv_2h;
      total += d * d;
    }
  }
  return total * u.grid.h();
}

EnergyReport energy_report(const DensityVector& u, const CouplingMatrix& A) {
  return {energy_quadratic(u, A), entropy_boltzmann(u), energy_dirichlet(u)};
}

std::vector<std::vector<double>> pressure(const DensityVector& u, const CouplingMatrix& A) {
  require_match(u, A);
  const std::size_t N = u.n_species();
  const std::size_t n = u.grid.n_cells();
  std::vector<std::vector<double>> p(N, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const double a = A(i, j);
      if (a == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) p[i][c] += a * u.species[j][c];
    }
  return p;
}

}  // namespace wgf
