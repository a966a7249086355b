#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "wgf/kernels.hpp"

using namespace wgf::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> U(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  return v;
}

double lse_reference(const std::vector<double>& g, const std::vector<double>& c, double inv_eps) {
  long double mx = -std::numeric_limits<long double>::infinity();
  for (std::size_t k = 0; k < g.size(); ++k) mx = std::max(mx, static_cast<long double>((g[k] - c[k]) * inv_eps));
  long double s = 0.0L;
  for (std::size_t k = 0; k < g.size(); ++k) s += std::exp(static_cast<long double>((g[k] - c[k]) * inv_eps) - mx);
  return static_cast<double>(mx + std::log(s));
}

}  // namespace

TEST_CASE("dispatch") {
  const Isa isa = active_isa();
  CHECK((isa == Isa::Scalar || isa == Isa::Avx2));
  if (!cpu_has_avx2()) CHECK(isa == Isa::Scalar);
  CHECK(std::string(isa_name(Isa::Avx2)) == "avx2");
  CHECK(std::string(isa_name(Isa::Scalar)) == "scalar");
}

TEST_CASE("sum_sq_diff: vector path matches the scalar reference") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 31u, 64u, 1001u}) {
    const auto a = random_vector(rng, n, -2.0, 2.0);
    const auto b = random_vector(rng, n, -2.0, 2.0);
    const double s = scalar::sum_sq_diff(a.data(), b.data(), n);
    const double v = avx2::sum_sq_diff(a.data(), b.data(), n);
    CHECK(v == doctest::Approx(s).epsilon(1e-13));
    CHECK(sum_sq_diff(a.data(), b.data(), n) == doctest::Approx(s).epsilon(1e-13));
  }
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0}, y{0.0, 0.0, 0.0, 0.0, 0.0};
  CHECK(scalar::sum_sq_diff(x.data(), y.data(), 5) == 55.0);
  if (cpu_has_avx2()) CHECK(avx2::sum_sq_diff(x.data(), y.data(), 5) == 55.0);
}

TEST_CASE("lse_affine: both paths match a long-double reference") {
  std::mt19937_64 rng(12);
  for (double inv_eps : {1.0, 50.0, 1e3}) {
    for (std::size_t n : {1u, 2u, 4u, 6u, 9u, 16u, 33u, 257u}) {
      const auto g = random_vector(rng, n, -1.0, 1.0);
      const auto c = random_vector(rng, n, 0.0, 3.0);
      const double ref = lse_reference(g, c, inv_eps);
      const double tol = 1e-13 * std::max(1.0, std::abs(ref));
      CHECK(std::abs(scalar::lse_affine(g.data(), c.data(), inv_eps, n) - ref) <= tol);
      if (cpu_has_avx2()) CHECK(std::abs(avx2::lse_affine(g.data(), c.data(), inv_eps, n) - ref) <= tol);
    }
  }
  SUBCASE("terms far below the maximum vanish without underflow noise") {
    const std::vector<double> g{0.0, -1e6, -2e6, -3e6, -4e6}, c(5, 0.0);
    CHECK(scalar::lse_affine(g.data(), c.data(), 1.0, 5) == 0.0);
    if (cpu_has_avx2()) CHECK(avx2::lse_affine(g.data(), c.data(), 1.0, 5) == 0.0);
  }
}

TEST_CASE("joint_row_update: vector path is bitwise identical") {
  std::mt19937_64 rng(13);
  for (std::size_t n : {1u, 5u, 6u, 7u, 10u, 13u, 64u, 129u}) {
    const auto qu = random_vector(rng, n, 0.0, 1.0);
    const auto q = random_vector(rng, n, 0.0, 1.0);
    const auto qd = random_vector(rng, n, 0.0, 1.0);
    const auto mu = random_vector(rng, n, 0.0, 2.0);
    const auto md = random_vector(rng, n, 0.0, 2.0);
    auto my = random_vector(rng, n + 1, 0.0, 2.0);
    my.front() = 0.0;
    my.back() = 0.0;
    const auto p = random_vector(rng, n, 0.0, 1.0);
    std::vector<double> out_s(n), out_v(n);
    JointRow row{qu.data(), q.data(), qd.data(), mu.data(), md.data(), my.data(), p.data(), out_s.data(), n, 0.1, 0.07};
    scalar::joint_row_update(row);
    row.out = out_v.data();
    if (cpu_has_avx2()) avx2::joint_row_update(row);
    else scalar::joint_row_update(row);
    CHECK(out_s == out_v);
  }
}

TEST_CASE("joint_row_update: a flat row is stationary") {
  const std::size_t n = 9;
  std::vector<double> q(n, 4.0), m(n, 1.0), my(n + 1, 1.0), p(n, 2.0), out(n);
  my.front() = my.back() = 0.0;
  JointRow row{q.data(), q.data(), q.data(), m.data(), m.data(), my.data(), p.data(), out.data(), n, 0.3, 0.3};
  joint_row_update(row);
  for (double v : out) CHECK(v == 2.0);
}
