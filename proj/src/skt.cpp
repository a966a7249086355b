#include "wgf/skt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "wgf/error.hpp"
#include "wgf/kernels.hpp"

namespace wgf {

MobilityField build_mobility(const Grid2D& grid, double sigma, double floor) {
  require(sigma > 0.0, ErrorKind::InvalidArgument, "mobility width must be positive");
  return build_mobility(grid, sigma, floor, 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi)));
}

MobilityField build_mobility(const Grid2D& grid, double sigma, double floor, double amplitude) {
  require(sigma > 0.0, ErrorKind::InvalidArgument, "mobility width must be positive");
  require(floor > 0.0, ErrorKind::InvalidArgument, "mobility floor must be positive");
  require(amplitude >= 0.0, ErrorKind::InvalidArgument, "mobility amplitude must be nonnegative");
  MobilityField M{grid, std::vector<double>(grid.size()), sigma, floor, amplitude, 0.0, 0.0};
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t i = 0; i < grid.n1(); ++i) {
    for (std::size_t j = 0; j < grid.n2(); ++j) {
      const double s = grid.axis1.center(i) - grid.axis2.center(j);
      M.values[grid.index(i, j)] = floor + amplitude * std::exp(-s * s * inv);
    }
  }
  const auto [lo, hi] = std::minmax_element(M.values.begin(), M.values.end());
  M.lower = *lo;
  M.upper = *hi;
  return M;
}

double cfl_joint(const JointDensity& p, const MobilityField& M) {
  require(p.grid == M.grid, ErrorKind::DimensionMismatch, "density and mobility grids differ");
  double mp = 0.0;
  for (std::size_t k = 0; k < p.values.size(); ++k) mp = std::max(mp, M.values[k] * p.values[k]);
  const double h = std::min(p.grid.h1(), p.grid.h2());
  return mp > 0.0 ? 0.25 * h * h / mp : std::numeric_limits<double>::infinity();
}

JointDensity step_joint_fd(const JointDensity& p, const MobilityField& M, double dt) {
  require(dt > 0.0, ErrorKind::InvalidArgument, "dt must be positive");
  const double bound = cfl_joint(p, M);
  if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream m;
    m << "joint step dt = " << dt << " exceeds the admissible " << bound;
    throw CFLViolation(m.str(), bound);
  }
  const Grid2D& g = p.grid;
  const std::size_t n1 = g.n1(), n2 = g.n2();

  // flux M̄ p̄ ∂p = ½ M̄ ∂(p²): face coefficients carry ½ M̄ = ¼ (M_a + M_b)
  std::vector<double> mx((n1 + 1) * n2, 0.0), my(n1 * (n2 + 1), 0.0), q(p.values.size());
  for (std::size_t i = 1; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) mx[i * n2 + j] = 0.25 * (M.at(i - 1, j) + M.at(i, j));
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 1; j < n2; ++j) my[i * (n2 + 1) + j] = 0.25 * (M.at(i, j - 1) + M.at(i, j));
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = p.values[k] * p.values[k];

  JointDensity out(g);
  const double ax = dt / (g.h1() * g.h1());
  const double ay = dt / (g.h2() * g.h2());
  for (std::size_t i = 0; i < n1; ++i) {
    kernels::JointRow row{};
    row.q = &q[i * n2];
    row.q_up = i > 0 ? &q[(i - 1) * n2] : row.q;
    row.q_dn = i + 1 < n1 ? &q[(i + 1) * n2] : row.q;
    row.mx_up = &mx[i * n2];
    row.mx_dn = &mx[(i + 1) * n2];
    row.my = &my[i * (n2 + 1)];
    row.p = &p.values[i * n2];
    row.out = &out.values[i * n2];
    row.n = n2;
    row.ax = ax;
    row.ay = ay;
    kernels::joint_row_update(row);
  }
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    if (out.values[k] < 0.0) {
      raise(ErrorKind::NegativityDetected, "joint density negative at cell (" + std::to_string(k / n2) + ", " +
                                               std::to_string(k % n2) + ")");
    }
  }
  return out;
}

MarginalPair marginals(const JointDensity& p) {
  const Grid2D& g = p.grid;
  std::vector<double> u1(g.n1(), 0.0), u2(g.n2(), 0.0);
  for (std::size_t i = 0; i < g.n1(); ++i) {
    for (std::size_t j = 0; j < g.n2(); ++j) {
      u1[i] += p.at(i, j);
      u2[j] += p.at(i, j);
    }
  }
  for (double& v : u1) v *= g.h2();
  for (double& v : u2) v *= g.h1();
  return {Density(g.axis1, std::move(u1)), Density(g.axis2, std::move(u2))};
}

double relative_entropy(const JointDensity& p) {
  const auto m = marginals(p);
  double s = 0.0;
  for (std::size_t i = 0; i < p.grid.n1(); ++i) {
    for (std::size_t j = 0; j < p.grid.n2(); ++j) {
      const double v = p.at(i, j);
      if (!(v > 0.0)) continue;
      s += v * std::log(v / std::max(m.u1[i] * m.u2[j], 1e-300));
    }
  }
  const double H = s * p.grid.h1() * p.grid.h2();
  require(H >= -1e-12, ErrorKind::CheckFailed, "relative entropy negative");
  return std::max(H, 0.0);
}

JointDensity product_density(const Density& u1, const Density& u2) {
  JointDensity p(Grid2D{u1.grid, u2.grid});
  for (std::size_t i = 0; i < u1.size(); ++i)
    for (std::size_t j = 0; j < u2.size(); ++j) p.at(i, j) = u1[i] * u2[j];
  return p;
}

JointDensity gaussian_product(const Grid2D& grid, double c1, double c2, double variance) {
  require(variance > 0.0, ErrorKind::InvalidArgument, "variance must be positive");
  auto axis = [&](const Grid1D& a, double c) {
    std::vector<double> v(a.n_cells());
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double z = a.center(k) - c;
      v[k] = std::exp(-z * z / (2.0 * variance));
    }
    return normalize(v, a).density;
  };
  return product_density(axis(grid.axis1, c1), axis(grid.axis2, c2));
}

double band_mass(const JointDensity& p, double width) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.grid.n1(); ++i)
    for (std::size_t j = 0; j < p.grid.n2(); ++j)
      if (std::abs(p.grid.axis1.center(i) - p.grid.axis2.center(j)) < width) s += p.at(i, j);
  return s * p.grid.h1() * p.grid.h2();
}

namespace {

MobilityField scenario_mobility(const SktScenario& s) {
  return s.amplitude ? build_mobility(s.grid, s.sigma, s.floor, *s.amplitude) : build_mobility(s.grid, s.sigma, s.floor);
}

void validate(const SktScenario& s) {
  require(s.t_final > 0.0, ErrorKind::InvalidArgument, "t_final must be positive");
  require(s.snapshots >= 1, ErrorKind::InvalidArgument, "need at least one output time");
  require(s.dt >= 0.0, ErrorKind::InvalidArgument, "dt must be nonnegative");
  require(s.safety > 0.0 && s.safety <= 1.0, ErrorKind::InvalidArgument, "safety must lie in (0, 1]");
}

}  // namespace

SktRun run_skt_scenario(const SktScenario& s) {
  validate(s);
  const MobilityField M = scenario_mobility(s);
  JointDensity p = gaussian_product(s.grid, s.center1, s.center2, s.variance);
  const double mass0 = p.mass();
  const double band = 2.0 * s.sigma;

  SktRun run;
  run.record.notes["mobility"] = "M(s) = c_M + Z exp(-s^2 / (2 sigma^2))";
  {
    std::ostringstream m;
    m << "sigma=" << s.sigma << " c_M=" << s.floor << " Z=" << M.amplitude << " bounds=[" << M.lower << ", "
      << M.upper << "]";
    run.record.notes["mobility_parameters"] = m.str();
  }

  auto observe = [&](double t) {
    run.record.times.push_back(t);
    run.record.entropy.push_back(relative_entropy(p));
    run.band_mass.push_back(band_mass(p, band));
    if (!run.contact_time && run.band_mass.back() > s.contact_mass) run.contact_time = t;
  };
  auto snapshot = [&](double t) {
    run.output_times.push_back(t);
    run.snapshots.push_back(p);
    run.marginals.push_back(marginals(p));
  };

  double t = 0.0, drift = 0.0;
  std::size_t contact_index = std::numeric_limits<std::size_t>::max();
  observe(0.0);
  snapshot(0.0);
  if (run.contact_time) contact_index = 0;
  for (std::size_t j = 1; j <= s.snapshots; ++j) {
    const double target = s.t_final * static_cast<double>(j) / static_cast<double>(s.snapshots);
    while (t < target) {
      double dt = s.dt > 0.0 ? s.dt : s.safety * cfl_joint(p, M);
      bool hits = false;
      if (t + dt >= target * (1.0 - 1e-14)) {
        dt = target - t;
        hits = true;
      }
      if (!(dt > 0.0)) break;
      p = step_joint_fd(p, M, dt);
      t = hits ? target : t + dt;
      run.record.tau.push_back(dt);
      drift = std::max(drift, std::abs(p.mass() - mass0));
      observe(t);
      if (run.contact_time && contact_index == std::numeric_limits<std::size_t>::max())
        contact_index = run.record.times.size() - 1;
      ++run.steps;
    }
    snapshot(t);
  }

  const auto& H = run.record.entropy;
  {
    CheckResult c;
    c.name = "entropy_initial";
    c.tolerance = 1e-6;
    c.margin = c.tolerance - H.front();
    c.pass = c.margin >= 0.0;
    c.detail = "H(0) = " + std::to_string(H.front());
    run.record.checks.push_back(c);
  }
  {
    CheckResult c;
    c.name = "entropy_growth";
    c.tolerance = 10.0 * H.front();
    c.margin = H.back() - c.tolerance;
    c.pass = c.margin > 0.0;
    std::ostringstream d;
    d << "H(T) = " << H.back() << " against 10 H(0) = " << c.tolerance;
    c.detail = d.str();
    run.record.checks.push_back(c);
  }
  {
    CheckResult c;
    c.name = "entropy_after_contact";
    c.tolerance = 1e-9;
    c.margin = c.tolerance;
    std::ostringstream d;
    if (contact_index < H.size()) {
      std::size_t worst = contact_index;
      for (std::size_t k = contact_index; k + 1 < H.size(); ++k) {
        const double m = H[k + 1] - H[k] + c.tolerance;
        if (m < c.margin) {
          c.margin = m;
          worst = k + 1;
        }
      }
      d << "contact at t = " << *run.contact_time << ", tightest at step " << worst;
    } else {
      d << "no contact before t = " << t;
    }
    c.pass = c.margin >= 0.0;
    c.detail = d.str();
    run.record.checks.push_back(c);
  }
  {
    CheckResult c;
    c.name = "mass";
    c.tolerance = 1e-10;
    c.margin = c.tolerance - drift;
    c.pass = c.margin >= 0.0;
    std::ostringstream d;
    d << "max drift " << drift;
    c.detail = d.str();
    run.record.checks.push_back(c);
  }
  run.record.notes["contact_time"] = run.contact_time ? std::to_string(*run.contact_time) : "none";
  return run;
}

std::pair<std::vector<double>, std::vector<double>> nonlocal_coefficients(const MarginalPair& u,
                                                                          const MobilityField& M,
                                                                          DecoupledVariant variant) {
  const Grid2D& g = M.grid;
  require(u.u1.grid == g.axis1 && u.u2.grid == g.axis2, ErrorKind::DimensionMismatch,
          "marginals do not match the mobility grid");
  const bool quad = variant == DecoupledVariant::Quadratic;
  std::vector<double> a1(g.n1(), 0.0), a2(g.n2(), 0.0);
  for (std::size_t i = 0; i < g.n1(); ++i) {
    const double w1 = quad ? u.u1[i] * u.u1[i] : u.u1[i];
    for (std::size_t j = 0; j < g.n2(); ++j) {
      const double w2 = quad ? u.u2[j] * u.u2[j] : u.u2[j];
      a1[i] += M.at(i, j) * w2;
      a2[j] += M.at(i, j) * w1;
    }
  }
  for (double& v : a1) v *= g.h2();
  for (double& v : a2) v *= g.h1();
  return {std::move(a1), std::move(a2)};
}

namespace {

double species_bound(const std::vector<double>& a, const Density& u, bool quad) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) m = std::max(m, quad ? a[c] * u[c] : a[c]);
  const double h = u.grid.h();
  return m > 0.0 ? 0.25 * h * h / m : std::numeric_limits<double>::infinity();
}

Density advance(const Density& u, const std::vector<double>& a, double dt, bool quad) {
  const std::size_t n = u.size();
  const double h = u.grid.h();
  std::vector<double> F(n + 1, 0.0);  // F_{c+½} > 0 carries mass from c+1 into c
  for (std::size_t c = 0; c + 1 < n; ++c) {
    const double abar = 0.5 * (a[c] + a[c + 1]);
    F[c + 1] = quad ? abar * 0.5 * (u[c + 1] * u[c + 1] - u[c] * u[c]) : abar * (u[c + 1] - u[c]);
  }
  Density out(u.grid);
  const double k = dt / (h * h);
  for (std::size_t c = 0; c < n; ++c) {
    out[c] = u[c] + k * (F[c + 1] - F[c]);
    if (out[c] < 0.0) raise(ErrorKind::NegativityDetected, "decoupled species negative at cell " + std::to_string(c));
  }
  return out;
}

}  // namespace

double cfl_decoupled(const MarginalPair& u, const MobilityField& M, DecoupledVariant variant) {
  const auto [a1, a2] = nonlocal_coefficients(u, M, variant);
  const bool quad = variant == DecoupledVariant::Quadratic;
  return std::min(species_bound(a1, u.u1, quad), species_bound(a2, u.u2, quad));
}

MarginalPair step_decoupled_fd(const MarginalPair& u, const MobilityField& M, double dt, DecoupledVariant variant) {
  require(dt > 0.0, ErrorKind::InvalidArgument, "dt must be positive");
  const auto [a1, a2] = nonlocal_coefficients(u, M, variant);
  const bool quad = variant == DecoupledVariant::Quadratic;
  const double bound = std::min(species_bound(a1, u.u1, quad), species_bound(a2, u.u2, quad));
  if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream m;
    m << "decoupled step dt = " << dt << " exceeds the admissible " << bound;
    throw CFLViolation(m.str(), bound);
  }
  return {advance(u.u1, a1, dt, quad), advance(u.u2, a2, dt, quad)};
}

CompareReport compare_correlated_vs_decoupled(const SktScenario& s, DecoupledVariant variant) {
  validate(s);
  const MobilityField M = scenario_mobility(s);
  JointDensity p = gaussian_product(s.grid, s.center1, s.center2, s.variance);
  MarginalPair u = marginals(p);

  CompareReport rep;
  auto observe = [&](double t) {
    const auto m = marginals(p);
    double gap = 0.0;
    for (std::size_t i = 0; i < m.u1.size(); ++i) gap += std::abs(m.u1[i] - u.u1[i]) * s.grid.h1();
    for (std::size_t j = 0; j < m.u2.size(); ++j) gap += std::abs(m.u2[j] - u.u2[j]) * s.grid.h2();
    rep.times.push_back(t);
    rep.gap.push_back(gap);
    rep.entropy.push_back(relative_entropy(p));
  };

  observe(0.0);
  double t = 0.0;
  for (std::size_t j = 1; j <= s.snapshots; ++j) {
    const double target = s.t_final * static_cast<double>(j) / static_cast<double>(s.snapshots);
    while (t < target) {
      double dt = s.dt > 0.0 ? s.dt : s.safety * std::min(cfl_joint(p, M), cfl_decoupled(u, M, variant));
      bool hits = false;
      if (t + dt >= target * (1.0 - 1e-14)) {
        dt = target - t;
        hits = true;
      }
      if (!(dt > 0.0)) break;
      p = step_joint_fd(p, M, dt);
      u = step_decoupled_fd(u, M, dt, variant);
      t = hits ? target : t + dt;
    }
    observe(t);
  }

  rep.initial_gap.name = "initial_gap";
  rep.initial_gap.tolerance = 1e-6;
  rep.initial_gap.margin = rep.initial_gap.tolerance - rep.gap.front();
  rep.initial_gap.pass = rep.initial_gap.margin >= 0.0;
  rep.initial_gap.detail = "gap(0) = " + std::to_string(rep.gap.front());
  return rep;
}

}  // namespace wgf
