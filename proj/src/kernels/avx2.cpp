// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include "wgf/kernels.hpp"

namespace wgf::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

// exp(z) for z <= 0; lanes below -708 return 0. Range reduction by ln 2 in two
// parts, rational approximation of exp on |r| <= ln2/2, scaling via exponent bits.
inline __m256d exp_nonpositive(__m256d z) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000009e0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d floor_z = _mm256_set1_pd(-708.0);

  const __m256d live = _mm256_cmp_pd(z, floor_z, _CMP_GE_OQ);
  z = _mm256_max_pd(z, floor_z);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(z, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(z, _mm256_mul_pd(n, c1));
  r = _mm256_sub_pd(r, _mm256_mul_pd(n, c2));

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d px = _mm256_add_pd(_mm256_mul_pd(p0, rr), p1);
  px = _mm256_add_pd(_mm256_mul_pd(px, rr), p2);
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_add_pd(_mm256_mul_pd(q0, rr), q1);
  qx = _mm256_add_pd(_mm256_mul_pd(qx, rr), q2);
  qx = _mm256_add_pd(_mm256_mul_pd(qx, rr), q3);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_add_pd(one, _mm256_mul_pd(two, e));

  // n is integral and within [-1022, 0]; recover it as int64 via the 2^52+2^51 shift.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  const __m256i ni = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)), _mm256_castpd_si256(magic));
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_and_pd(e, live);
}

}  // namespace

double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double s = hsum(acc);
  for (; k < n; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double lse_affine(const double* g, const double* c, double inv_eps, std::size_t n) noexcept {
  const __m256d ie = _mm256_set1_pd(inv_eps);
  double mx = -std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  if (n >= 4) {
    __m256d vm = _mm256_set1_pd(mx);
    for (; k + 4 <= n; k += 4) {
      const __m256d z = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(g + k), _mm256_loadu_pd(c + k)), ie);
      vm = _mm256_max_pd(vm, z);
    }
    mx = hmax(vm);
  }
  for (; k < n; ++k) mx = std::fmax(mx, (g[k] - c[k]) * inv_eps);
  if (!std::isfinite(mx)) return mx;

  const __m256d shift = _mm256_set1_pd(mx);
  __m256d acc = _mm256_setzero_pd();
  k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d z = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(g + k), _mm256_loadu_pd(c + k)), ie);
    acc = _mm256_add_pd(acc, exp_nonpositive(_mm256_sub_pd(z, shift)));
  }
  double s = hsum(acc);
  for (; k < n; ++k) {
    const double z = (g[k] - c[k]) * inv_eps - mx;
    if (z >= -708.0) s += std::exp(z);
  }
  return mx + std::log(s);
}

void joint_row_update(const JointRow& r) noexcept {
  const std::size_t n = r.n;
  if (n < 6) {
    scalar::joint_row_update(r);
    return;
  }
  auto edge = [&r, n](std::size_t j) {
    const double qj = r.q[j];
    const double dx = r.mx_dn[j] * (r.q_dn[j] - qj) - r.mx_up[j] * (qj - r.q_up[j]);
    const double fy_hi = j + 1 < n ? r.my[j + 1] * (r.q[j + 1] - qj) : 0.0;
    const double fy_lo = j > 0 ? r.my[j] * (qj - r.q[j - 1]) : 0.0;
    r.out[j] = r.p[j] + (r.ax * dx + r.ay * (fy_hi - fy_lo));
  };

  edge(0);
  const __m256d ax = _mm256_set1_pd(r.ax);
  const __m256d ay = _mm256_set1_pd(r.ay);
  std::size_t j = 1;
  for (; j + 4 <= n - 1; j += 4) {
    const __m256d qj = _mm256_loadu_pd(r.q + j);
    const __m256d fx_hi = _mm256_mul_pd(_mm256_loadu_pd(r.mx_dn + j), _mm256_sub_pd(_mm256_loadu_pd(r.q_dn + j), qj));
    const __m256d fx_lo = _mm256_mul_pd(_mm256_loadu_pd(r.mx_up + j), _mm256_sub_pd(qj, _mm256_loadu_pd(r.q_up + j)));
    const __m256d fy_hi = _mm256_mul_pd(_mm256_loadu_pd(r.my + j + 1), _mm256_sub_pd(_mm256_loadu_pd(r.q + j + 1), qj));
    const __m256d fy_lo = _mm256_mul_pd(_mm256_loadu_pd(r.my + j), _mm256_sub_pd(qj, _mm256_loadu_pd(r.q + j - 1)));
    const __m256d dx = _mm256_sub_pd(fx_hi, fx_lo);
    const __m256d dy = _mm256_sub_pd(fy_hi, fy_lo);
    const __m256d inc = _mm256_add_pd(_mm256_mul_pd(ax, dx), _mm256_mul_pd(ay, dy));
    _mm256_storeu_pd(r.out + j, _mm256_add_pd(_mm256_loadu_pd(r.p + j), inc));
  }
  for (; j < n; ++j) edge(j);
}

}  // namespace wgf::kernels::avx2
