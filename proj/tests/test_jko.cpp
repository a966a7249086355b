#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "wgf/error.hpp"
#include "wgf/fdref.hpp"
#include "wgf/jko.hpp"
#include "wgf/transport1d.hpp"

using namespace wgf;

namespace {

DensityVector smooth_pair(const Grid1D& g) {
  const std::size_t n = g.n_cells();
  std::vector<double> a(n), b(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double x = (g.center(c) - g.x_min()) / g.length();
    a[c] = 1.0 + 0.5 * std::cos(std::numbers::pi * x);
    b[c] = 1.0 + 0.4 * std::cos(2.0 * std::numbers::pi * x);
  }
  return DensityVector(g, {normalize(a, g).density.values, normalize(b, g).density.values});
}

DensityVector barenblatt_state(const Grid1D& g, double t) { return DensityVector(g, {barenblatt(t, g).values}); }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::CheckFailed;
}

}  // namespace

TEST_CASE("JKOSchedule") {
  auto s = JKOSchedule::uniform(0.01, 5);
  CHECK(s.tau.size() == 5);
  CHECK(s.horizon() == doctest::Approx(0.05));
  CHECK(s.sup() == 0.01);
  JKOSchedule bad{{0.1, 0.0}};
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("jko_step_lagrangian") {
  const CouplingMatrix A(2, {2, 1, 1, 2});

  SUBCASE("a vanishing step leaves the state in place") {
    Grid1D g(128, 0.0, 1.0);
    auto u = smooth_pair(g);
    auto [v, rep] = jko_step_lagrangian(u, A, 1e-8);
    CHECK(rep.w2_increment <= 1e-3);
    CHECK(w2_product(u, v) <= 1e-3);
  }

  SUBCASE("energy decreases and mass is kept") {
    Grid1D g(64, 0.0, 1.0);
    auto u = smooth_pair(g);
    auto [v, rep] = jko_step_lagrangian(u, A, 1e-3);
    CHECK(rep.converged);
    CHECK(rep.energy_after <= rep.energy_before);
    CHECK(rep.objective_after <= rep.objective_before);
    CHECK(rep.w2_increment > 0.0);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::abs(mass(g, v.species[i]) - 1.0) < 1e-9);
      for (double x : v.species[i]) CHECK(x >= 0.0);
    }
  }

  SUBCASE("relabeling the species commutes with a step, bit for bit") {
    Grid1D g(48, 0.0, 1.0);
    auto u = smooth_pair(g);
    CouplingMatrix B(2, {3, 1, 1, 2});
    JKOOptions o;
    o.fixed_iterations = 15;
    o.compute_residual = false;
    auto [v, r1] = jko_step_lagrangian(u, B, 1e-3, o);
    DensityVector swapped(g, {u.species[1], u.species[0]});
    auto [w, r2] = jko_step_lagrangian(swapped, B.permuted({1, 0}), 1e-3, o);
    CHECK(w.species[0] == v.species[1]);
    CHECK(w.species[1] == v.species[0]);
    CHECK(r1.energy_after == r2.energy_after);
  }

  SUBCASE("identical species under the identity coupling stay identical") {
    Grid1D g(48, 0.0, 1.0);
    auto u = smooth_pair(g);
    DensityVector same(g, {u.species[0], u.species[0]});
    auto [v, rep] = jko_step_lagrangian(same, CouplingMatrix::identity(2), 1e-3);
    CHECK(v.species[0] == v.species[1]);
  }

  SUBCASE("one step follows the Barenblatt solution") {
    const Barenblatt b;
    const double t0 = b.time_for_height(1.0);
    const double tau = 1e-3;
    Grid1D g(256, -1.5, 1.5);
    auto [v, rep] = jko_step_lagrangian(barenblatt_state(g, t0), CouplingMatrix::identity(1), tau);
    const double err = l1_error(v.species[0], barenblatt(t0 + tau, g).values, g.h());
    // C (tau + h + 1/L) with C = 1
    CHECK(err <= tau + 2.0 * g.h());
  }

  SUBCASE("fourth-order energy also decreases") {
    Grid1D g(64, 0.0, 1.0);
    auto u = smooth_pair(g);
    JKOOptions o;
    o.with_dirichlet = true;
    auto [v, rep] = jko_step_lagrangian(u, A, 1e-5, o);
    CHECK(rep.energy_after <= rep.energy_before);
    CHECK(energy_quadratic(v, A) + energy_dirichlet(v) <= energy_quadratic(u, A) + energy_dirichlet(u) + 1e-12);
  }

  SUBCASE("indefinite coupling is rejected") {
    Grid1D g(16, 0.0, 1.0);
    auto u = smooth_pair(g);
    CouplingMatrix bad(2, {1, 2, 2, 1});
    CHECK(kind_of([&] { jko_step_lagrangian(u, bad, 1e-3); }) == ErrorKind::NotPositiveDefinite);
    CHECK(kind_of([&] { jko_step_entropic(u, bad, 1e-3, 1e-3); }) == ErrorKind::NotPositiveDefinite);
  }
}

TEST_CASE("jko_step_entropic") {
  SUBCASE("a constant density is steady away from the wall layer") {
    // the Gibbs kernel is cut by the walls, which leaves a layer of width O(sqrt(eps))
    Grid1D g(64, 0.0, 1.0);
    DensityVector u(g, {std::vector<double>(64, 1.0)});
    const double eps = 1e-4;
    auto [v, rep] = jko_step_entropic(u, CouplingMatrix::identity(1), 1e-3, eps);
    for (std::size_t c = 0; c < 64; ++c) {
      const double wall = std::min(g.center(c), 1.0 - g.center(c));
      if (wall >= 25.0 * std::sqrt(eps)) CHECK(std::abs(v.species[0][c] - 1.0) < 1e-6);
    }
    CHECK(std::abs(mass(g, v.species[0]) - 1.0) < 1e-10);
  }

  SUBCASE("a vanishing step only blurs at the entropic scale") {
    Grid1D g(64, 0.0, 1.0);
    auto u = smooth_pair(g);
    const double eps = 1e-3;
    auto [v, rep] = jko_step_entropic(u, CouplingMatrix(2, {2, 1, 1, 2}), 1e-8, eps);
    CHECK(w2_product(u, v) <= std::sqrt(eps));
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(mass(g, v.species[i]) - 1.0) < 1e-10);
  }

  SUBCASE("agrees with the Lagrangian solver") {
    Grid1D g(128, 0.0, 1.0);
    auto u = smooth_pair(g);
    const CouplingMatrix A(2, {2, 1, 1, 2});
    auto [a, ra] = jko_step_lagrangian(u, A, 1e-3);
    auto [b, rb] = jko_step_entropic(u, A, 1e-3, 1e-3);
    for (std::size_t i = 0; i < 2; ++i) CHECK(l1_error(a.species[i], b.species[i], g.h()) <= 5e-2);
    CHECK(rb.energy_after < rb.energy_before);
  }

  SUBCASE("an epsilon far below h² underflows the kernel") {
    Grid1D g(16, 0.0, 1.0);
    DensityVector u(g, {std::vector<double>(16, 1.0)});
    CHECK(kind_of([&] { jko_step_entropic(u, CouplingMatrix::identity(1), 1e-3, 1e-8); }) == ErrorKind::KernelUnderflow);
  }

  SUBCASE("an outer cap that is too small is reported") {
    Grid1D g(32, 0.0, 1.0);
    auto u = smooth_pair(g);
    JKOOptions o;
    o.max_outer = 2;
    CHECK(kind_of([&] { jko_step_entropic(u, CouplingMatrix(2, {2, 1, 1, 2}), 1e-3, 1e-3, o); }) ==
          ErrorKind::InnerDiverged);
  }
}

TEST_CASE("optimality_residual") {
  const CouplingMatrix A(2, {2, 1, 1, 2});

  SUBCASE("the uniform state is a pure energy minimum") {
    Grid1D g(32, 0.0, 1.0);
    DensityVector u(g, {std::vector<double>(32, 1.0), std::vector<double>(32, 1.0)});
    auto r = optimality_residual(u, u, A, 1e3);
    for (double x : r.residual) CHECK(x < 1e-12);
  }

  SUBCASE("decreases under refinement on smooth data") {
    double prev = 0.0;
    for (std::size_t n : {32u, 64u, 128u}) {
      Grid1D g(n, 0.0, 1.0);
      auto u = smooth_pair(g);
      JKOOptions o;
      o.tol_obj = 1e-13;
      auto [v, rep] = jko_step_lagrangian(u, A, 1e-3, o);
      auto r = optimality_residual(u, v, A, 1e-3);
      const double worst = std::max(r.residual[0], r.residual[1]);
      CHECK(r.off_support_violations[0] == 0);
      if (prev > 0.0) CHECK(prev / worst >= 1.5);
      prev = worst;
    }
  }

  SUBCASE("a perturbed minimizer is detected") {
    Grid1D g(64, 0.0, 1.0);
    auto u = smooth_pair(g);
    auto [v, rep] = jko_step_lagrangian(u, A, 1e-3);
    const double exact = optimality_residual(u, v, A, 1e-3).residual[0];
    std::vector<double> w = v.species[0];
    for (std::size_t c = 0; c < 64; ++c) w[c] *= 1.0 + 0.05 * std::sin(7.0 * g.center(c));
    DensityVector pert(g, {normalize(w, g).density.values, v.species[1]});
    const double r = optimality_residual(u, pert, A, 1e-3).residual[0];
    CHECK(r > 10.0 * exact);
    CHECK(r > 1e-2);
  }
}

TEST_CASE("run_jko") {
  const CouplingMatrix A(2, {2, 1, 1, 2});

  SUBCASE("zero steps return the initial state") {
    Grid1D g(32, 0.0, 1.0);
    auto u = smooth_pair(g);
    auto run = run_jko(u, A, JKOSchedule{}, JKOSolver::Lagrangian);
    REQUIRE(run.trajectory.size() == 1);
    CHECK(run.trajectory[0].species == u.species);
    CHECK(run.record.all_pass());
  }

  SUBCASE("a short benchmark run passes every estimate") {
    Grid1D g(64, 0.0, 1.0);
    auto u = smooth_pair(g);
    for (auto solver : {JKOSolver::Lagrangian, JKOSolver::Entropic}) {
      auto run = run_jko(u, A, JKOSchedule::uniform(1e-3, 10), solver);
      CHECK(run.trajectory.size() == 11);
      CHECK(run.record.times.back() == doctest::Approx(1e-2));
      CHECK(run.record.checks.size() == 4);
      for (const auto& c : run.record.checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
      }
      for (const auto& r : run.record.residual) CHECK(r.size() == 2);
    }
  }

  SUBCASE("Barenblatt closure over several steps") {
    const Barenblatt b;
    const double t0 = b.time_for_height(1.0);
    Grid1D g(128, -1.5, 1.5);
    JKOOptions o;
    o.compute_residual = false;
    auto run = run_jko(barenblatt_state(g, t0), CouplingMatrix::identity(1), JKOSchedule::uniform(2e-3, 20),
                       JKOSolver::Lagrangian, o);
    const double err = l1_error(run.trajectory.back().species[0], barenblatt(t0 + 0.04, g).values, g.h());
    CHECK(err <= 2e-2);
  }
}
