#pragma once

// Hot inner loops with a portable scalar reference and an AVX2 variant.
// The active variant is chosen once at first use from CPUID; setting the
// environment variable WGF_SIMD=scalar forces the reference path.

#include <cstddef>

namespace wgf::kernels {

enum class Isa { Scalar, Avx2 };

Isa active_isa() noexcept;
const char* isa_name(Isa isa) noexcept;
bool cpu_has_avx2() noexcept;

/// Σ (a_k − b_k)².
double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept;

/// log Σ_k exp((g_k − c_k) · inv_eps), evaluated stably (max-shifted).
/// Terms whose shifted exponent is below −708 contribute exactly 0.
double lse_affine(const double* g, const double* c, double inv_eps, std::size_t n) noexcept;

/// One row of the conservative 2D update for ∂t p = div(M p ∇p), written in
/// terms of q = p²: out_j = p_j + ax·(mx_dn_j (qdn_j − q_j) − mx_up_j (q_j − qup_j))
///                              + ay·(my_{j+1} (q_{j+1} − q_j) − my_j (q_j − q_{j−1})).
/// `my` has n+1 face entries; my[0] and my[n] must be 0 (no-flux).
struct JointRow {
  const double* q_up;
  const double* q;
  const double* q_dn;
  const double* mx_up;
  const double* mx_dn;
  const double* my;
  const double* p;
  double* out;
  std::size_t n;
  double ax;
  double ay;
};
void joint_row_update(const JointRow& row) noexcept;

namespace scalar {
double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept;
double lse_affine(const double* g, const double* c, double inv_eps, std::size_t n) noexcept;
void joint_row_update(const JointRow& row) noexcept;
}  // namespace scalar

namespace avx2 {
double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept;
double lse_affine(const double* g, const double* c, double inv_eps, std::size_t n) noexcept;
void joint_row_update(const JointRow& row) noexcept;
}  // namespace avx2

}  // namespace wgf::kernels
