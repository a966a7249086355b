#include <cstdlib>
#include <cstring>

#include "wgf/kernels.hpp"

namespace wgf::kernels {
namespace {

struct Table {
  Isa isa;
  double (*sum_sq_diff)(const double*, const double*, std::size_t) noexcept;
  double (*lse_affine)(const double*, const double*, double, std::size_t) noexcept;
  void (*joint_row_update)(const JointRow&) noexcept;
};

Table select() noexcept {
  const char* force = std::getenv("WGF_SIMD");
  const bool scalar_only = force != nullptr && std::strcmp(force, "scalar") == 0;
  if (!scalar_only && cpu_has_avx2()) {
    return {Isa::Avx2, &avx2::sum_sq_diff, &avx2::lse_affine, &avx2::joint_row_update};
  }
  return {Isa::Scalar, &scalar::sum_sq_diff, &scalar::lse_affine, &scalar::joint_row_update};
}

const Table& table() noexcept {
  static const Table t = select();
  return t;
}

}  // namespace

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() noexcept { return table().isa; }

const char* isa_name(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

double sum_sq_diff(const double* a, const double* b, std::size_t n) noexcept {
  return table().sum_sq_diff(a, b, n);
}

double lse_affine(const double* g, const double* c, double inv_eps, std::size_t n) noexcept {
  return table().lse_affine(g, c, inv_eps, n);
}

void joint_row_update(const JointRow& row) noexcept { table().joint_row_update(row); }

}  // namespace wgf::kernels
