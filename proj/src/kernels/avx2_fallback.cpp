// Non-x86 builds: the AVX2 entry points forward to the scalar reference so the
// dispatch table links; cpu_has_avx2() is false there and they are never selected.

#include "wgf/kernels.hpp"

namespace wgf::kernels::avx2 {

double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept { return scalar::sum_sq_diff(a, b, n); }

double lse_affine(const double* g, const double* c, double inv_eps, std::size_t n) noexcept {
  return scalar::lse_affine(g, c, inv_eps, n);
}

void joint_row_update(const JointRow& row) noexcept { scalar::joint_row_update(row); }

}  // namespace wgf::kernels::avx2
