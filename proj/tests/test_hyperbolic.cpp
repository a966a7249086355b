#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "wgf/error.hpp"
#include "wgf/fdref.hpp"
#include "wgf/hyperbolic.hpp"
#include "wgf/transport1d.hpp"

using namespace wgf;

namespace {

std::vector<double> bump(const Grid1D& g, double center, double half_width) {
  std::vector<double> v(g.n_cells());
  for (std::size_t c = 0; c < v.size(); ++c) {
    const double z = (g.center(c) - center) / half_width;
    v[c] = std::max(0.0, 1.0 - z * z);
  }
  return normalize(v, g).density.values;
}

DensityVector segregated(const Grid1D& g) { return DensityVector(g, {bump(g, 0.3, 0.15), bump(g, 0.7, 0.15)}); }

}  // namespace

TEST_CASE("split_state and recover_species") {
  Grid1D g(32, 0.0, 1.0);

  SUBCASE("equal species give half fractions") {
    auto b = bump(g, 0.5, 0.3);
    auto pf = split_state(DensityVector(g, {b, b}));
    for (std::size_t c = 0; c < 32; ++c) {
      CHECK(pf.p[c] == doctest::Approx(b[c]));
      if (b[c] > 0.0) CHECK(pf.r[0][c] == doctest::Approx(0.5));
      else CHECK(pf.r[0][c] == 0.0);
    }
  }

  SUBCASE("segregated species give 0/1 fractions") {
    auto pf = split_state(segregated(g));
    for (std::size_t c = 0; c < 32; ++c)
      if (pf.p[c] > 0.0) CHECK((pf.r[0][c] == 0.0 || pf.r[0][c] == 1.0));
  }

  SUBCASE("round trip on random positive data") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.1, 2.0);
    std::vector<std::vector<double>> s(3, std::vector<double>(32));
    for (auto& v : s)
      for (auto& x : v) x = U(rng);
    DensityVector u(g, s);
    auto back = recover_species(split_state(u));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t c = 0; c < 32; ++c) CHECK(std::abs(back.species[i][c] - u.species[i][c]) <= 1e-12);
  }
}

TEST_CASE("tv") {
  const std::vector<double> flat(5, 3.0), up{0.0, 1.0, 1.5, 4.0}, spike{0.0, 1.0, 0.0};
  CHECK(tv(flat) == 0.0);
  CHECK(tv(up) == doctest::Approx(4.0));
  CHECK(tv(spike) == 2.0);
  const std::vector<double> p{1.0, 0.0, 1.0}, r{1.0, 0.0, 1.0};
  CHECK(tv_on_support(r, p) == 0.0);
}

TEST_CASE("step_splitting") {
  SUBCASE("constant pressure leaves everything unchanged") {
    Grid1D g(16, 0.0, 1.0);
    PressureFraction pf{g, std::vector<double>(16, 2.0), {std::vector<double>(16)}};
    for (std::size_t c = 0; c < 16; ++c) pf.r[0][c] = (c % 3) / 2.0;
    auto out = step_splitting(pf, 0.5 * cfl_splitting(pf));
    CHECK(out.p == pf.p);
    CHECK(out.r == pf.r);
  }

  SUBCASE("a step above the bound reports the admissible one") {
    Grid1D g(16, 0.0, 1.0);
    auto pf = split_state(DensityVector(g, {bump(g, 0.5, 0.3)}));
    const double bound = cfl_splitting(pf);
    try {
      step_splitting(pf, 2.0 * bound);
      FAIL("no exception");
    } catch (const CFLViolation& e) {
      CHECK(e.admissible_dt() == doctest::Approx(bound));
    }
  }

  SUBCASE("the pressure follows the Barenblatt solution under refinement") {
    const Barenblatt b;
    const double t0 = b.time_for_height(1.0);
    double prev = 0.0;
    for (std::size_t n : {64u, 128u, 256u}) {
      Grid1D g(n, -1.5, 1.5);
      HyperbolicOptions o;
      o.t_final = 0.05;
      o.snapshots = 1;
      auto run = run_hyperbolic(DensityVector(g, {barenblatt(t0, g).values}), o);
      const double err = l1_error(run.pressure.back().values, barenblatt(t0 + 0.05, g).values, g.h());
      CHECK(err <= 5e-2);
      if (prev > 0.0) CHECK(err < prev);
      prev = err;
    }
  }

  SUBCASE("a sharp interface stays sharp under a frozen gradient") {
    // p linear, so v = -p' is constant and the interface moves at that speed
    Grid1D g(64, 0.0, 1.0);
    PressureFraction pf{g, std::vector<double>(64), {std::vector<double>(64)}};
    for (std::size_t c = 0; c < 64; ++c) {
      pf.p[c] = 1.0 + 0.5 * g.center(c);
      pf.r[0][c] = g.center(c) < 0.5 ? 1.0 : 0.0;
    }
    auto out = step_splitting(pf, 0.5 * cfl_splitting(pf));
    for (std::size_t c = 1; c + 1 < 64; ++c) {
      CHECK(out.r[0][c] >= 0.0);
      CHECK(out.r[0][c] <= 1.0);
      if (std::abs(g.center(c) - 0.5) > 2.0 * g.h()) CHECK((out.r[0][c] == 0.0 || out.r[0][c] == 1.0));
    }
    CHECK(tv(out.r[0]) <= tv(pf.r[0]) + 1e-12);
  }
}

TEST_CASE("pressure_transport_step") {
  SUBCASE("an unchanged pressure is the identity") {
    Grid1D g(64, 0.0, 1.0);
    auto u = segregated(g);
    const auto p = mean_pressure(u);
    auto v = pressure_transport_step(u, p, p);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t c = 0; c < 64; ++c) CHECK(v.species[i][c] == doctest::Approx(u.species[i][c]).epsilon(1e-12));
  }

  SUBCASE("a translated pressure translates every species") {
    Grid1D g(64, 0.0, 1.0);
    const std::size_t k = 5;
    std::vector<double> a(64, 0.0), b(64, 0.0);
    for (std::size_t c = 10; c < 20; ++c) a[c] = 1.0 + 0.1 * static_cast<double>(c - 10);
    for (std::size_t c = 20; c < 30; ++c) b[c] = 2.0 - 0.05 * static_cast<double>(c - 20);
    DensityVector u(g, {normalize(a, g).density.values, normalize(b, g).density.values});
    const auto p = mean_pressure(u);
    Density q(g);
    for (std::size_t c = 0; c + k < 64; ++c) q[c + k] = p[c];
    auto v = pressure_transport_step(u, p, q);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t c = 0; c + k < 64; ++c)
        CHECK(v.species[i][c + k] == doctest::Approx(u.species[i][c]).epsilon(1e-9));
    CHECK(w2_product(u, v) == doctest::Approx(std::sqrt(2.0) * static_cast<double>(k) * g.h()).epsilon(1e-9));
  }

  SUBCASE("an expanding pressure keeps segregated supports apart") {
    const Barenblatt bb;
    const double t0 = bb.time_for_height(1.0);
    Grid1D g(32, -1.5, 1.5);
    const auto p0 = barenblatt(t0, g);
    const auto p1 = barenblatt(t0 + 0.05, g);
    DensityVector u(g, 2);
    for (std::size_t c = 0; c < 32; ++c) (g.center(c) < 0.0 ? u.species[0] : u.species[1])[c] = 2.0 * p0[c];
    auto v = pressure_transport_step(u, Density(g, p0.values), Density(g, p1.values));
    CHECK(support_overlap(v) == 0);
    for (std::size_t c = 0; c < 32; ++c) {
      if (v.species[0][c] > 0.0) CHECK(g.center(c) < 0.0);
      if (v.species[1][c] > 0.0) CHECK(g.center(c) > 0.0);
    }
  }

  SUBCASE("a pressure that is not the species mean is rejected") {
    Grid1D g(16, 0.0, 1.0);
    DensityVector u(g, {std::vector<double>(16, 1.0), std::vector<double>(16, 1.0)});
    Density p(g, std::vector<double>(16, 2.0));
    try {
      pressure_transport_step(u, p, p);
      FAIL("no exception");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CheckFailed);
    }
  }
}

TEST_CASE("run_hyperbolic") {
  Grid1D g(128, 0.0, 1.0);

  SUBCASE("segregated bumps stay segregated under both schemes") {
    for (auto scheme : {HyperbolicScheme::Splitting, HyperbolicScheme::PressureTransport}) {
      HyperbolicOptions o;
      o.scheme = scheme;
      o.t_final = 0.05;
      o.snapshots = 5;
      auto run = run_hyperbolic(segregated(g), o);
      CHECK(run.trajectory.size() == 6);
      for (const auto& c : run.record.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
      }
      for (const auto& u : run.trajectory) CHECK(support_overlap(u) <= 2);
    }
  }

  SUBCASE("identical species stay identical") {
    auto b = bump(g, 0.5, 0.2);
    for (auto scheme : {HyperbolicScheme::Splitting, HyperbolicScheme::PressureTransport}) {
      HyperbolicOptions o;
      o.scheme = scheme;
      o.t_final = 0.02;
      o.snapshots = 2;
      auto run = run_hyperbolic(DensityVector(g, {b, b}), o);
      for (std::size_t j = 0; j < run.trajectory.size(); ++j) {
        const auto& u = run.trajectory[j];
        for (std::size_t c = 0; c < 128; ++c) {
          CHECK(u.species[0][c] == doctest::Approx(u.species[1][c]).epsilon(1e-12));
          CHECK(u.species[0][c] == doctest::Approx(run.pressure[j][c]).epsilon(1e-12));
        }
      }
    }
  }

  SUBCASE("the species sum follows a standalone porous-medium run") {
    HyperbolicOptions o;
    o.t_final = 0.05;
    o.snapshots = 5;
    auto run = run_hyperbolic(segregated(g), o);
    DensityVector p0(g, {run.pressure[0].values});
    std::vector<double> times(run.output_times.begin() + 1, run.output_times.end());
    auto fd = run_bt_fd(p0, CouplingMatrix::identity(1), times, 0.25);
    for (std::size_t j = 0; j < times.size(); ++j) {
      std::vector<double> sum(128);
      for (std::size_t c = 0; c < 128; ++c) sum[c] = 0.5 * (run.trajectory[j + 1].species[0][c] + run.trajectory[j + 1].species[1][c]);
      CHECK(l1_error(sum, fd.snapshots[j].species[0], g.h()) <= 5e-2);
    }
  }
}
