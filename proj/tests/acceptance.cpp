// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/lp.hpp"
#include "wgf/diagnostics.hpp"
#include "wgf/error.hpp"
#include "wgf/fdref.hpp"
#include "wgf/hyperbolic.hpp"
#include "wgf/jko.hpp"
#include "wgf/kernels.hpp"
#include "wgf/skt.hpp"
#include "wgf/transport1d.hpp"

using namespace wgf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// shared data

const CouplingMatrix& benchmark_matrix() {
  static const CouplingMatrix A(2, {2.0, 1.0, 1.0, 2.0});
  return A;
}

DensityVector benchmark_pair(const Grid1D& g) {
  const std::size_t n = g.n_cells();
  std::vector<double> a(n), b(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double x = (g.center(c) - g.x_min()) / g.length();
    a[c] = 1.0 + 0.5 * std::cos(std::numbers::pi * x);
    b[c] = 1.0 + 0.4 * std::cos(2.0 * std::numbers::pi * x);
  }
  return DensityVector(g, {normalize(a, g).density.values, normalize(b, g).density.values});
}

DensityVector segregated_pair(const Grid1D& g) {
  auto bump = [&](double center) {
    std::vector<double> v(g.n_cells());
    for (std::size_t c = 0; c < v.size(); ++c) {
      const double z = (g.center(c) - center) / 0.15;
      v[c] = std::max(0.0, 1.0 - z * z);
    }
    return normalize(v, g).density.values;
  };
  return DensityVector(g, {bump(0.3), bump(0.7)});
}

double max_species_l1(const DensityVector& a, const DensityVector& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.n_species(); ++i)
    worst = std::max(worst, l1_error(a.species[i], b.species[i], a.grid.h()));
  return worst;
}

std::string failing_checks(const std::vector<CheckResult>& checks) {
  std::string out;
  for (const auto& c : checks) {
    if (c.pass) continue;
    char buf[160];
    std::snprintf(buf, sizeof buf, " %s (margin %.3g, tol %.3g)", c.name.c_str(), c.margin, c.tolerance);
    out += buf;
  }
  return out;
}

bool all_pass(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

// Runs shared between criteria, computed once.
struct Runs {
  JKORun barenblatt;                 // criterion 3
  double barenblatt_seconds = 0.0;
  double barenblatt_t0 = 0.0;
  JKORun lagrangian, entropic;       // criterion 4 and 5
  HyperbolicRun split, transport;    // criteria 7 and 8
};

Runs& runs() {
  static Runs r;
  return r;
}

// ---------------------------------------------------------------------------
// criteria

Verdict c1_ot_exactness() {
  const auto start = Clock::now();
  Grid1D g(8, 0.0, 1.0);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    std::vector<double> ra(8), rb(8);
    for (double& v : ra) v = U(rng);
    for (double& v : rb) v = U(rng);
    const auto u = normalize(ra, g).density, v = normalize(rb, g).density;
    std::vector<double> a, b, x;
    for (std::size_t c = 0; c < 8; ++c) {
      a.push_back(u[c] * g.h());
      b.push_back(v[c] * g.h());
      x.push_back(g.center(c));
    }
    const double lp_w2 = std::sqrt(std::max(0.0, lp::transport_cost(a, x, b, x)));
    worst = std::max(worst, std::abs(w2_exact(u, v) - lp_w2));
  }
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << "max |w2_exact - LP| = " << worst << " (tol 1e-8), " << secs << " s (limit 1 s)";
  return {worst <= 1e-8 && secs < 1.0, d.str()};
}

std::vector<double> smooth_random_profile(const Grid1D& g, const std::vector<double>& coef) {
  std::vector<double> v(g.n_cells());
  for (std::size_t c = 0; c < v.size(); ++c) {
    const double x = (g.center(c) - g.x_min()) / g.length();
    double s = 1.0;
    for (std::size_t k = 0; k < coef.size(); ++k) s += coef[k] * std::cos(static_cast<double>(k + 1) * std::numbers::pi * x);
    v[c] = s;
  }
  return normalize(v, g).density.values;
}

Verdict c2_kantorovich() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-0.3, 0.3);
  bool ok = true;
  double worst_ratio_to_bound = 0.0, min_ratio = std::numeric_limits<double>::infinity();
  for (int pair = 0; pair < 10; ++pair) {
    std::vector<double> ca(3), cb(3);
    for (double& c : ca) c = U(rng);
    for (double& c : cb) c = U(rng);
    double res[2];
    int k = 0;
    for (std::size_t n : {128u, 256u}) {
      Grid1D g(n, 0.0, 1.0);
      const Density u(g, smooth_random_profile(g, ca)), v(g, smooth_random_profile(g, cb));
      const auto phi = kantorovich_potential_1d(u, v);
      const double w = w2_quantile(u, v, n);
      res[k] = std::abs(potential_cost(phi, u) - w * w);
      const double bound = 2.0 * (g.h() + 1.0 / static_cast<double>(n)) * g.length();
      if (n == 128) {
        worst_ratio_to_bound = std::max(worst_ratio_to_bound, res[k] / bound);
        ok = ok && res[k] <= bound;
      }
      ++k;
    }
    const double ratio = res[0] / res[1];
    min_ratio = std::min(min_ratio, ratio);
    ok = ok && ratio >= 1.5;
  }
  std::ostringstream d;
  d << "max residual/bound at n=128 = " << worst_ratio_to_bound << ", min refinement ratio = " << min_ratio
    << " (need >= 1.5)";
  return {ok, d.str()};
}

Verdict c3_barenblatt() {
  Grid1D g(256, -1.5, 1.5);
  const Barenblatt b;
  const double t0 = b.time_for_height(1.0);
  JKOOptions o;
  o.levels = 256;
  o.compute_residual = false;
  const auto start = Clock::now();
  auto& R = runs();
  R.barenblatt = run_jko(DensityVector(g, {barenblatt(t0, g).values}), CouplingMatrix::identity(1),
                         JKOSchedule::uniform(1e-3, 250), JKOSolver::Lagrangian, o);
  R.barenblatt_seconds = seconds_since(start);
  R.barenblatt_t0 = t0;
  const double err = l1_error(R.barenblatt.trajectory.back().species[0], barenblatt(t0 + 0.25, g).values, g.h());
  std::ostringstream d;
  d << "terminal L1 error = " << err << " (tol 5e-2), t0 = " << t0 << ", " << R.barenblatt_seconds
    << " s (limit 300 s)";
  return {err <= 5e-2 && R.barenblatt_seconds <= 300.0, d.str()};
}

Verdict c4_cross_solver() {
  Grid1D g(128, 0.0, 1.0);
  const auto u0 = benchmark_pair(g);
  JKOOptions o;
  o.epsilon = 1e-3;
  auto& R = runs();
  R.lagrangian = run_jko(u0, benchmark_matrix(), JKOSchedule::uniform(1e-3, 50), JKOSolver::Lagrangian, o);
  R.entropic = run_jko(u0, benchmark_matrix(), JKOSchedule::uniform(1e-3, 50), JKOSolver::Entropic, o);
  double worst = 0.0;
  std::size_t at = 0;
  for (std::size_t k = 1; k < R.lagrangian.trajectory.size(); ++k) {
    const double gap = max_species_l1(R.lagrangian.trajectory[k], R.entropic.trajectory[k]);
    if (gap > worst) {
      worst = gap;
      at = k;
    }
  }
  std::ostringstream d;
  d << "max per-step L1 gap = " << worst << " at step " << at << " of 50 (tol 5e-2)";
  return {worst <= 5e-2, d.str()};
}

Verdict c5_jko_fd() {
  const auto& L = runs().lagrangian;
  const auto& u0 = L.trajectory.front();
  // the reference starts from the raw data, the JKO run from its represented state
  Grid1D g = u0.grid;
  const auto raw = benchmark_pair(g);
  std::vector<double> times(L.record.times.begin() + 1, L.record.times.end());
  const auto fd = run_bt_fd(raw, benchmark_matrix(), times);
  double worst = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) worst = std::max(worst, max_species_l1(L.trajectory[k + 1], fd.snapshots[k]));
  const double final_gap = max_species_l1(L.trajectory.back(), fd.snapshots.back());
  std::ostringstream d;
  d << "L1 gap at t = " << times.back() << ": " << final_gap << ", max over all 50 steps " << worst << " (tol 5e-2)";
  return {final_gap <= 5e-2 && worst <= 5e-2, d.str()};
}

Verdict c6_estimates() {
  const auto& R = runs();
  bool ok = true;
  std::ostringstream d;
  auto suite = [&](const char* label, const JKORun& run) {
    const bool pass = all_pass(run.record.checks);
    ok = ok && pass;
    d << label << (pass ? " ok" : " FAIL:" + failing_checks(run.record.checks)) << "; ";
  };
  suite("barenblatt", R.barenblatt);
  suite("benchmark lagrangian", R.lagrangian);
  suite("benchmark entropic", R.entropic);

  // residual refinement: one step of the benchmark at h, h/2, h/4 with L = n
  double prev = 0.0, min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t n : {64u, 128u, 256u}) {
    Grid1D g(n, 0.0, 1.0);
    const auto u = benchmark_pair(g);
    JKOOptions o;
    o.tol_obj = 1e-13;
    auto [v, rep] = jko_step_lagrangian(u, benchmark_matrix(), 1e-3, o);
    const auto r = optimality_residual(u, v, benchmark_matrix(), 1e-3);
    const double worst = *std::max_element(r.residual.begin(), r.residual.end());
    if (prev > 0.0) min_ratio = std::min(min_ratio, prev / worst);
    prev = worst;
  }
  ok = ok && min_ratio >= 1.5;
  d << "residual refinement min ratio " << min_ratio << " (need >= 1.5)";
  return {ok, d.str()};
}

Verdict c7_hyperbolic() {
  Grid1D g(256, 0.0, 1.0);
  const auto u0 = segregated_pair(g);
  HyperbolicOptions o;
  o.scheme = HyperbolicScheme::Splitting;
  o.t_final = 0.2;
  o.snapshots = 10;
  auto& R = runs();
  R.split = run_hyperbolic(u0, o);
  bool ok = all_pass(R.split.record.checks);
  std::size_t overlap = 0;
  for (const auto& u : R.split.trajectory) overlap = std::max(overlap, support_overlap(u));
  ok = ok && overlap <= 2;

  // standalone porous-medium run of the pressure: N = 1, A = (1)
  JKOOptions jo;
  jo.compute_residual = false;
  const double tau = 1e-3;
  const std::size_t stride = static_cast<std::size_t>(std::lround(0.02 / tau));
  const auto pm = run_jko(DensityVector(g, {mean_pressure(u0).values}), CouplingMatrix::identity(1),
                          JKOSchedule::uniform(tau, 200), JKOSolver::Lagrangian, jo);
  double gap = 0.0;
  for (std::size_t j = 1; j < R.split.pressure.size(); ++j)
    gap = std::max(gap, l1_error(R.split.pressure[j].values, pm.trajectory[j * stride].species[0], g.h()));
  ok = ok && gap <= 5e-2;

  std::ostringstream d;
  d << "checks " << (all_pass(R.split.record.checks) ? "ok" : "FAIL:" + failing_checks(R.split.record.checks))
    << "; max support overlap " << overlap << " cells (limit 2); pressure vs porous-medium run L1 " << gap
    << " (tol 5e-2); " << R.split.steps << " steps";
  return {ok, d.str()};
}

Verdict c8_metric_speed() {
  Grid1D g(256, 0.0, 1.0);
  HyperbolicOptions o;
  o.scheme = HyperbolicScheme::PressureTransport;
  o.t_final = 0.2;
  o.snapshots = 10;
  auto& R = runs();
  R.transport = run_hyperbolic(segregated_pair(g), o);
  const auto c = check_metric_speed(R.transport.record, R.transport.pressure_record, 2, 1e-8);
  std::ostringstream d;
  d << "min margin of sqrt(2) W2(p) + 1e-8 - W2(u) = " << c.margin << " over " << R.transport.steps << " steps";
  return {c.pass, d.str()};
}

Verdict c9_skt() {
  const auto start = Clock::now();
  const auto run = run_skt_scenario(SktScenario{});
  const double secs = seconds_since(start);
  const auto& H = run.record.entropy;
  std::ostringstream d;
  d << "H(0) = " << H.front() << ", H(1) = " << H.back();
  if (run.contact_time) d << ", contact at t = " << *run.contact_time;
  else d << ", no diagonal contact (max band mass " << *std::max_element(run.band_mass.begin(), run.band_mass.end()) << ")";
  d << ", " << run.steps << " steps, " << secs << " s (limit 600 s)";
  if (!all_pass(run.record.checks)) d << "; failing:" << failing_checks(run.record.checks);
  return {all_pass(run.record.checks) && secs <= 600.0, d.str()};
}

Verdict c10_symmetry() {
  const SktScenario s;
  const auto M = build_mobility(s.grid, s.sigma, s.floor);
  auto p = gaussian_product(s.grid, s.center1, s.center2, s.variance);
  const std::size_t n = s.grid.n1();
  auto asymmetry = [&](const JointDensity& q) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(q.at(i, j) - q.at(n - 1 - j, n - 1 - i)));
    return worst;
  };
  double mob = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) mob = std::max(mob, std::abs(M.at(i, j) - M.at(n - 1 - j, n - 1 - i)));
  double worst = asymmetry(p);
  for (int k = 0; k < 100; ++k) {
    p = step_joint_fd(p, M, cfl_joint(p, M));
    worst = std::max(worst, asymmetry(p));
  }
  std::ostringstream d;
  d << "max |p(x1,x2) - p(-x2,-x1)| over 100 steps = " << worst << " (tol 1e-12), mobility asymmetry " << mob;
  return {worst <= 1e-12 && mob <= 1e-12, d.str()};
}

Verdict c11_fourth_order() {
  Grid1D g(128, 0.0, 1.0);
  const auto u0 = benchmark_pair(g);
  const double dt = 0.5 * cfl_bt4_fd(u0, benchmark_matrix());
  const auto run = run_bt4_fd(u0, benchmark_matrix(), dt, 100);
  double drift = 0.0;
  for (const auto& u : run.snapshots)
    for (std::size_t i = 0; i < 2; ++i) drift = std::max(drift, std::abs(mass(g, u.species[i]) - mass(g, u0.species[i])));
  double rise = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < run.energy.size(); ++k) rise = std::max(rise, run.energy[k + 1] - run.energy[k]);
  std::ostringstream d;
  d << "mass drift " << drift << " (tol 1e-12), largest energy change per step " << rise << " over "
    << run.energy.size() - 1 << " steps, dt = " << dt;
  return {drift <= 1e-12 && rise <= 0.0 && run.energy.size() == 101, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"C1  1D OT exactness vs LP", c1_ot_exactness},
      {"C2  Kantorovich identity", c2_kantorovich},
      {"C3  JKO-Barenblatt closure", c3_barenblatt},
      {"C4  Lagrangian vs entropic JKO", c4_cross_solver},
      {"C5  JKO vs finite-volume reference", c5_jko_fd},
      {"C6  estimate suite", c6_estimates},
      {"C7  hyperbolic invariants", c7_hyperbolic},
      {"C8  metric-speed bound", c8_metric_speed},
      {"C9  joint-density entropy growth", c9_skt},
      {"C10 swap-reflection symmetry", c10_symmetry},
      {"C11 fourth-order mass and energy", c11_fourth_order},
  };
  std::printf("kernels: %s\n", kernels::isa_name(kernels::active_isa()));
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    const auto start = Clock::now();
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("raised: ") + e.what()};
    }
    std::printf("[%s] %-36s %s  [%.1f s]\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
