#include "wgf/fdref.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wgf/error.hpp"

namespace wgf {

double Barenblatt::A() const noexcept { return std::pow(3.0 * mass / (4.0 * std::sqrt(6.0)), 2.0 / 3.0); }

double Barenblatt::value(double t, double x) const {
  require(t > 0.0, ErrorKind::NonpositiveTime, "Barenblatt profile needs t > 0");
  const double y = x - center;
  const double v = A() - y * y / (6.0 * std::cbrt(t * t));
  return v > 0.0 ? v / std::cbrt(t) : 0.0;
}

double Barenblatt::time_derivative(double t, double x) const {
  require(t > 0.0, ErrorKind::NonpositiveTime, "Barenblatt profile needs t > 0");
  const double y = x - center;
  const double t23 = std::cbrt(t * t);
  if (A() - y * y / (6.0 * t23) <= 0.0) return 0.0;
  // d/dt [A t^{-1/3} − y² t^{-1} / 6]
  return -A() / (3.0 * std::cbrt(t) * t) + y * y / (6.0 * t * t);
}

double Barenblatt::half_width(double t) const { return std::cbrt(t) * std::sqrt(6.0 * A()); }

double Barenblatt::time_for_height(double height) const {
  require(height > 0.0, ErrorKind::InvalidArgument, "peak height must be positive");
  const double r = A() / height;
  return r * r * r;
}

Density barenblatt(double t, const Grid1D& grid, double mass, double center) {
  require(t > 0.0, ErrorKind::NonpositiveTime, "Barenblatt profile needs t > 0, got " + std::to_string(t));
  const Barenblatt b{mass, center};
  const double A = b.A();
  const double R = b.half_width(t);
  const double s = 1.0 / std::cbrt(t);
  const double k = 1.0 / (18.0 * std::cbrt(t * t));
  auto G = [&](double y) { return s * (A * y - k * y * y * y); };
  Density out(grid);
  for (std::size_t c = 0; c < grid.n_cells(); ++c) {
    const double a = std::max(grid.edge(c) - center, -R);
    const double z = std::min(grid.edge(c + 1) - center, R);
    if (z > a) out.values[c] = (G(z) - G(a)) / grid.h();
  }
  return out;
}

Density heat_kernel(double t, const Grid1D& grid, double diffusivity, double mass, double center) {
  require(t > 0.0, ErrorKind::NonpositiveTime, "heat kernel needs t > 0, got " + std::to_string(t));
  require(diffusivity > 0.0, ErrorKind::InvalidArgument, "diffusivity must be positive");
  const double scale = 1.0 / std::sqrt(4.0 * diffusivity * t);
  Density out(grid);
  for (std::size_t c = 0; c < grid.n_cells(); ++c) {
    const double lo = std::erf((grid.edge(c) - center) * scale);
    const double hi = std::erf((grid.edge(c + 1) - center) * scale);
    out.values[c] = 0.5 * mass * (hi - lo) / grid.h();
  }
  return out;
}

Density OracleProfile::evaluate(double t, const Grid1D& grid) const {
  if (kind == Kind::Barenblatt) return barenblatt(onset + t, grid, mass, center);
  return heat_kernel(onset + t, grid, diffusivity, mass, center);
}

namespace {

double max_abs_pressure(const std::vector<std::vector<double>>& p) {
  double m = 0.0;
  for (const auto& s : p)
    for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

double max_density(const DensityVector& u) {
  double m = 0.0;
  for (const auto& s : u.species)
    for (double v : s) m = std::max(m, v);
  return m;
}

void check_dt(double dt, double bound, const char* what) {
  require(dt > 0.0, ErrorKind::InvalidArgument, "time step must be positive");
  if (dt > bound * (1.0 + 1e-12)) {
    throw CFLViolation(std::string(what) + ": dt = " + std::to_string(dt) + " exceeds " + std::to_string(bound), bound);
  }
}

// u_c += dt/h (F_c − F_{c−1}) with F_c = ½(u_c + u_{c+1})(mu_{c+1} − mu_c)/h on interior interfaces.
void flux_update(const std::vector<double>& u, const std::vector<double>& mu, double dt, double h, std::vector<double>& out) {
  const std::size_t n = u.size();
  const double k = dt / (h * h);
  double left = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double right = c + 1 < n ? 0.5 * (u[c] + u[c + 1]) * (mu[c + 1] - mu[c]) : 0.0;
    out[c] = u[c] + k * (right - left);
    left = right;
  }
}

}  // namespace

double cfl_bt_fd(const DensityVector& u, const CouplingMatrix& A) {
  const double pmax = max_abs_pressure(pressure(u, A));
  const double h = u.grid.h();
  return pmax > 0.0 ? 0.5 * h * h / pmax : std::numeric_limits<double>::infinity();
}

DensityVector step_bt_fd(const DensityVector& u, const CouplingMatrix& A, double dt) {
  const auto p = pressure(u, A);
  const double h = u.grid.h();
  const double pmax = max_abs_pressure(p);
  check_dt(dt, pmax > 0.0 ? 0.5 * h * h / pmax : std::numeric_limits<double>::infinity(), "step_bt_fd");
  DensityVector out(u.grid, u.n_species());
  for (std::size_t i = 0; i < u.n_species(); ++i) flux_update(u.species[i], p[i], dt, h, out.species[i]);
  return out;
}

double cfl_bt4_fd(const DensityVector& u, const CouplingMatrix& A) {
  const double h = u.grid.h();
  const double umax = max_density(u);
  const double second = cfl_bt_fd(u, A);
  const double fourth = umax > 0.0 ? h * h * h * h / (8.0 * umax) : std::numeric_limits<double>::infinity();
  return std::min(second, fourth);
}

DensityVector step_bt4_fd(const DensityVector& u, const CouplingMatrix& A, double dt) {
  check_dt(dt, cfl_bt4_fd(u, A), "step_bt4_fd");
  const auto p = pressure(u, A);
  const double h = u.grid.h();
  const std::size_t n = u.grid.n_cells();
  DensityVector out(u.grid, u.n_species());
  std::vector<double> mu(n);
  for (std::size_t i = 0; i < u.n_species(); ++i) {
    const auto& s = u.species[i];
    for (std::size_t c = 0; c < n; ++c) {
      const double lo = c > 0 ? s[c - 1] : s[c];
      const double hi = c + 1 < n ? s[c + 1] : s[c];
      mu[c] = p[i][c] - ((hi + lo) - 2.0 * s[c]) / (h * h);
    }
    flux_update(s, mu, dt, h, out.species[i]);
  }
  return out;
}

FdRun run_bt_fd(const DensityVector& u0, const CouplingMatrix& A, std::span<const double> output_times, double safety) {
  require(safety > 0.0 && safety <= 1.0, ErrorKind::InvalidArgument, "CFL safety factor must lie in (0, 1]");
  FdRun run;
  DensityVector u = u0;
  double t = 0.0;
  run.energy.push_back(energy_quadratic(u, A));
  for (double target : output_times) {
    require(target >= t, ErrorKind::InvalidArgument, "output times must be ascending");
    while (t < target) {
      double dt = safety * cfl_bt_fd(u, A);
      if (!(t + dt < target - 1e-14 * std::max(1.0, target))) dt = target - t;
      u = step_bt_fd(u, A, dt);
      t = t + dt >= target - 1e-14 * std::max(1.0, target) ? target : t + dt;
      run.energy.push_back(energy_quadratic(u, A));
      ++run.steps;
    }
    run.times.push_back(target);
    run.snapshots.push_back(u);
  }
  return run;
}

FdRun run_bt4_fd(const DensityVector& u0, const CouplingMatrix& A, double dt, std::size_t steps) {
  FdRun run;
  DensityVector u = u0;
  run.energy.push_back(energy_quadratic(u, A) + energy_dirichlet(u));
  for (std::size_t k = 0; k < steps; ++k) {
    u = step_bt4_fd(u, A, dt);
    run.energy.push_back(energy_quadratic(u, A) + energy_dirichlet(u));
  }
  run.steps = steps;
  run.times.push_back(dt * static_cast<double>(steps));
  run.snapshots.push_back(u);
  return run;
}

double l1_error(std::span<const double> a, std::span<const double> b, double h) {
  require(a.size() == b.size(), ErrorKind::DimensionMismatch, "fields differ in length");
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += std::abs(a[c] - b[c]);
  return s * h;
}

double l1_error(const Density& a, const Density& b) {
  require(a.grid == b.grid, ErrorKind::DimensionMismatch, "densities live on different grids");
  return l1_error(a.values, b.values, a.grid.h());
}

double linf_error(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorKind::DimensionMismatch, "fields differ in length");
  double m = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) m = std::max(m, std::abs(a[c] - b[c]));
  return m;
}

double linf_error(const Density& a, const Density& b) {
  require(a.grid == b.grid, ErrorKind::DimensionMismatch, "densities live on different grids");
  return linf_error(a.values, b.values);
}

}  // namespace wgf
