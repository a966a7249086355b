#include <cmath>
#include <limits>

#include "wgf/kernels.hpp"

namespace wgf::kernels::scalar {

double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double lse_affine(const double* g, const double* c, double inv_eps, std::size_t n) noexcept {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) mx = std::fmax(mx, (g[k] - c[k]) * inv_eps);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double z = (g[k] - c[k]) * inv_eps - mx;
    if (z >= -708.0) s += std::exp(z);
  }
  return mx + std::log(s);
}

void joint_row_update(const JointRow& r) noexcept {
  const std::size_t n = r.n;
  for (std::size_t j = 0; j < n; ++j) {
    const double qj = r.q[j];
    const double dx = r.mx_dn[j] * (r.q_dn[j] - qj) - r.mx_up[j] * (qj - r.q_up[j]);
    const double fy_hi = j + 1 < n ? r.my[j + 1] * (r.q[j + 1] - qj) : 0.0;
    const double fy_lo = j > 0 ? r.my[j] * (qj - r.q[j - 1]) : 0.0;
    const double dy = fy_hi - fy_lo;
    r.out[j] = r.p[j] + (r.ax * dx + r.ay * dy);
  }
}

}  // namespace wgf::kernels::scalar
