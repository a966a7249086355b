#include "wgf/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "wgf/error.hpp"
#include "wgf/transport1d.hpp"

namespace wgf {

std::vector<double> PressureFraction::fraction(std::size_t i) const {
  require(i < n_species(), ErrorKind::InvalidArgument, "species index out of range");
  if (i < r.size()) return r[i];
  std::vector<double> last(p.size(), 0.0);
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (!(p[c] > 0.0)) continue;
    double s = 0.0;
    for (const auto& ri : r) s += ri[c];
    last[c] = std::max(0.0, 1.0 - s);
  }
  return last;
}

PressureFraction split_state(const DensityVector& u) {
  const std::size_t N = u.n_species();
  require(N >= 1, ErrorKind::InvalidArgument, "need at least one species");
  const std::size_t n = u.grid.n_cells();
  PressureFraction pf{u.grid, std::vector<double>(n, 0.0), std::vector<std::vector<double>>(N - 1, std::vector<double>(n, 0.0))};
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += u.species[i][c];
    pf.p[c] = s / static_cast<double>(N);
    if (s > 0.0) {
      for (std::size_t i = 0; i + 1 < N; ++i) pf.r[i][c] = u.species[i][c] / s;
    }
  }
  return pf;
}

DensityVector recover_species(const PressureFraction& pf) {
  const std::size_t N = pf.n_species();
  DensityVector u(pf.grid, N);
  const double nN = static_cast<double>(N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto r = pf.fraction(i);
    for (std::size_t c = 0; c < pf.p.size(); ++c) u.species[i][c] = nN * pf.p[c] * r[c];
  }
  return u;
}

double cfl_splitting(const PressureFraction& pf) {
  const double h = pf.grid.h();
  const std::size_t n = pf.p.size();
  const double pmax = *std::max_element(pf.p.begin(), pf.p.end());
  double gsum = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double gl = c > 0 ? std::abs(pf.p[c] - pf.p[c - 1]) / h : 0.0;
    const double gr = c + 1 < n ? std::abs(pf.p[c + 1] - pf.p[c]) / h : 0.0;
    gsum = std::max(gsum, gl + gr);
  }
  const double inf = std::numeric_limits<double>::infinity();
  const double diffusion = pmax > 0.0 ? 0.5 * h * h / pmax : inf;
  const double transport = gsum > 0.0 ? h / gsum : inf;
  return std::min(diffusion, transport);
}

PressureFraction step_splitting(const PressureFraction& pf, double dt) {
  require(dt > 0.0, ErrorKind::InvalidArgument, "dt must be positive");
  const double bound = cfl_splitting(pf);
  if (dt > bound * (1.0 + 1e-12)) {
    std::ostringstream m;
    m << "splitting step dt = " << dt << " exceeds the admissible " << bound;
    throw CFLViolation(m.str(), bound);
  }
  const std::size_t n = pf.p.size();
  const double h = pf.grid.h();
  const double k = dt / h;
  const auto& p = pf.p;

  // interface fluxes of d_t p = d_x(p d_x p); F > 0 carries mass from c+1 into c
  std::vector<double> F(n + 1, 0.0);
  for (std::size_t c = 0; c + 1 < n; ++c) F[c + 1] = 0.5 * (p[c] + p[c + 1]) * (p[c + 1] - p[c]) / h;

  PressureFraction out{pf.grid, std::vector<double>(n), pf.r};
  for (std::size_t c = 0; c < n; ++c) out.p[c] = p[c] + k * (F[c + 1] - F[c]);

  std::vector<double> w(n);
  for (std::size_t i = 0; i < pf.r.size(); ++i) {
    const auto& r = pf.r[i];
    for (std::size_t c = 0; c < n; ++c) {
      const double right = F[c + 1] > 0.0 ? r[c + 1] : r[c];
      const double left = F[c] > 0.0 ? r[c] : (c > 0 ? r[c - 1] : r[c]);
      w[c] = p[c] * r[c] + k * (right * F[c + 1] - left * F[c]);
    }
    for (std::size_t c = 0; c < n; ++c) {
      double v = out.p[c] > 0.0 ? w[c] / out.p[c] : 0.0;
      if (v < -1e-12 || v > 1.0 + 1e-12) {
        raise(ErrorKind::CheckFailed, "fraction left [0, 1] at cell " + std::to_string(c));
      }
      out.r[i][c] = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

double tv_on_support(std::span<const double> field, std::span<const double> p) {
  require(field.size() == p.size(), ErrorKind::InvalidArgument, "field and pressure differ in size");
  double s = 0.0;
  bool have = false;
  double last = 0.0;
  for (std::size_t c = 0; c < field.size(); ++c) {
    if (!(p[c] > 0.0)) continue;
    if (have) s += std::abs(field[c] - last);
    last = field[c];
    have = true;
  }
  return s;
}

double tv(std::span<const double> field) {
  double s = 0.0;
  for (std::size_t c = 0; c + 1 < field.size(); ++c) s += std::abs(field[c + 1] - field[c]);
  return s;
}

Density mean_pressure(const DensityVector& u) {
  Density p(u.grid);
  const double N = static_cast<double>(u.n_species());
  for (std::size_t c = 0; c < p.size(); ++c) {
    double s = 0.0;
    for (const auto& sp : u.species) s += sp[c];
    p[c] = s / N;
  }
  return p;
}

DensityVector pressure_transport_step(const DensityVector& u_prev, const Density& p_prev, const Density& p_next) {
  require(u_prev.grid == p_prev.grid && p_prev.grid == p_next.grid, ErrorKind::DimensionMismatch,
          "pressure transport needs a common grid");
  const std::size_t N = u_prev.n_species();
  const std::size_t n = u_prev.grid.n_cells();
  const double h = u_prev.grid.h();
  const Density pi = mean_pressure(u_prev);
  double scale = 1.0;
  for (double v : p_prev.values) scale = std::max(scale, std::abs(v));
  for (std::size_t c = 0; c < n; ++c) {
    require(std::abs(pi[c] - p_prev[c]) <= 1e-9 * scale, ErrorKind::CheckFailed,
            "p_prev is not the mean of the species at cell " + std::to_string(c));
  }
  const double ma = mass(p_prev);
  const double mb = mass(p_next);
  require(ma > 0.0 && mb > 0.0, ErrorKind::DegenerateSupport, "pressure has no mass");
  require(std::abs(ma - mb) <= 1e-9 * ma, ErrorKind::CheckFailed, "pressure mass changed between the two states");

  // Monotone plan written through the mass shifted across each interface. A shift below the
  // round-off of its partial sum is unresolved and set to zero.
  std::vector<double> ma_c(n), mb_c(n);
  for (std::size_t c = 0; c < n; ++c) {
    ma_c[c] = p_prev[c] * h;
    mb_c[c] = p_next[c] * h;
  }
  constexpr double ulp = std::numeric_limits<double>::epsilon();
  std::vector<double> shift(n + 1, 0.0), left_sum(n + 1, 0.0), left_abs(n + 1, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    left_sum[c + 1] = left_sum[c] + (ma_c[c] - mb_c[c]);
    left_abs[c + 1] = left_abs[c] + ma_c[c] + mb_c[c];
  }
  double right_sum = 0.0, right_abs = 0.0;
  for (std::size_t c = n - 1; c >= 1; --c) {
    right_sum += ma_c[c] - mb_c[c];
    right_abs += ma_c[c] + mb_c[c];
    const bool from_left = left_abs[c] <= right_abs;
    const double d = from_left ? left_sum[c] : -right_sum;
    const double err = 16.0 * ulp * (from_left ? left_abs[c] : right_abs) * static_cast<double>(n);
    shift[c] = std::abs(d) > err ? d : 0.0;
  }

  std::vector<std::vector<double>> frac(N, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += u_prev.species[i][c];
    if (s > 0.0)
      for (std::size_t i = 0; i < N; ++i) frac[i][c] = u_prev.species[i][c] / s;
  }
  // target cell e covers [-shift[e], m_e - shift[e+1]] in source mass measured from the start of cell e
  std::vector<std::vector<double>> comp(N, std::vector<double>(n, 0.0));
  std::vector<char> filled(n, 0);
  for (std::size_t e = 0; e < n; ++e) {
    if (!(p_next[e] > 0.0)) continue;
    const double lo = -shift[e];
    const double hi = ma_c[e] - shift[e + 1];
    if (!(hi > lo)) continue;
    double total = 0.0;
    auto take = [&](std::size_t c, double a, double b) {
      const double o = std::min(hi, b) - std::max(lo, a);
      if (!(o > 0.0) || !(ma_c[c] > 0.0)) return;
      total += o;
      for (std::size_t i = 0; i < N; ++i) comp[i][e] += o * frac[i][c];
    };
    double s = 0.0;
    for (std::size_t c = e; c < n && s < hi; ++c) {
      take(c, s, s + ma_c[c]);
      s += ma_c[c];
    }
    s = 0.0;
    for (std::size_t c = e; c-- > 0 && s > lo;) {
      take(c, s - ma_c[c], s);
      s -= ma_c[c];
    }
    if (!(total > 0.0)) continue;
    for (std::size_t i = 0; i < N; ++i) comp[i][e] /= total;
    filled[e] = 1;
  }
  // cells reached by no resolved mass take the composition of their upstream (higher pressure) neighbour
  std::vector<std::size_t> order;
  for (std::size_t e = 0; e < n; ++e)
    if (p_next[e] > 0.0 && !filled[e]) order.push_back(e);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_next[a] > p_next[b]; });
  for (std::size_t e : order) {
    const bool has_l = e > 0 && filled[e - 1];
    const bool has_r = e + 1 < n && filled[e + 1];
    if (!has_l && !has_r) continue;
    const std::size_t src = has_l && (!has_r || p_next[e - 1] >= p_next[e + 1]) ? e - 1 : e + 1;
    for (std::size_t i = 0; i < N; ++i) comp[i][e] = comp[i][src];
    filled[e] = 1;
  }

  const double nN = static_cast<double>(N);
  DensityVector out(u_prev.grid, N);
  for (std::size_t e = 0; e < n; ++e) {
    if (!filled[e]) continue;
    for (std::size_t i = 0; i < N; ++i) out.species[i][e] = nN * p_next[e] * comp[i][e];
  }

  const double w_u = w2_product(u_prev, out);
  const double w_p = w2_exact(p_prev, p_next);
  const double bound = std::sqrt(nN) * w_p;
  require(w_u <= bound + 1e-8, ErrorKind::CheckFailed, "species moved farther than sqrt(N) times the pressure");
  return out;
}

std::size_t support_overlap(const DensityVector& u, double threshold) {
  std::size_t count = 0;
  for (std::size_t c = 0; c < u.grid.n_cells(); ++c) {
    std::size_t present = 0;
    for (const auto& s : u.species) present += s[c] > threshold ? 1 : 0;
    if (present >= 2) ++count;
  }
  return count;
}

namespace {

void record_tv(RunRecord& rec, const PressureFraction& pf) {
  rec.tv["p"].push_back(tv(pf.p));
  for (std::size_t i = 0; i < pf.n_species(); ++i)
    rec.tv["r" + std::to_string(i + 1)].push_back(tv_on_support(pf.fraction(i), pf.p));
}

}  // namespace

HyperbolicRun run_hyperbolic(const DensityVector& u0, const HyperbolicOptions& opts) {
  require(opts.t_final > 0.0, ErrorKind::InvalidArgument, "t_final must be positive");
  require(opts.snapshots >= 1, ErrorKind::InvalidArgument, "need at least one output time");
  require(opts.dt >= 0.0, ErrorKind::InvalidArgument, "dt must be nonnegative");
  const std::size_t N = u0.n_species();
  const bool transport = opts.scheme == HyperbolicScheme::PressureTransport;

  HyperbolicRun run;
  run.record.notes["scheme"] = transport ? "pressure_transport" : "splitting";
  run.record.notes["pressure"] = "p = (1/N) sum_i u_i, d_t p = d_x(p d_x p); no time rescaling";

  PressureFraction pf = split_state(u0);
  DensityVector u = transport ? u0 : recover_species(pf);
  std::vector<double> mass0(N);
  for (std::size_t i = 0; i < N; ++i) mass0[i] = mass(u0.grid, u0.species[i]);

  double t = 0.0;
  run.output_times.push_back(0.0);
  run.trajectory.push_back(u);
  run.pressure.emplace_back(u0.grid, pf.p);
  run.record.times.push_back(0.0);
  run.pressure_record.times.push_back(0.0);
  record_tv(run.record, pf);

  double r_min = 0.0, r_max = 1.0, mass_drift = 0.0;
  for (std::size_t j = 1; j <= opts.snapshots; ++j) {
    const double target = opts.t_final * static_cast<double>(j) / static_cast<double>(opts.snapshots);
    while (t < target) {
      double dt = opts.dt > 0.0 ? opts.dt : opts.safety * cfl_splitting(pf);
      bool hits = false;
      if (t + dt >= target * (1.0 - 1e-14)) {
        dt = target - t;
        hits = true;
      }
      if (!(dt > 0.0)) break;
      DensityVector u_next(u0.grid, N);
      PressureFraction pf_next = pf;
      if (transport) {
        const PressureFraction ponly = step_splitting(PressureFraction{pf.grid, pf.p, {}}, dt);
        u_next = pressure_transport_step(u, Density(u0.grid, pf.p), Density(u0.grid, ponly.p));
        pf_next = split_state(u_next);
        pf_next.p = ponly.p;
      } else {
        pf_next = step_splitting(pf, dt);
        u_next = recover_species(pf_next);
      }
      run.record.tau.push_back(dt);
      run.record.w2_increment.push_back(w2_product(u, u_next));
      run.pressure_record.tau.push_back(dt);
      run.pressure_record.w2_increment.push_back(w2_exact(Density(u0.grid, pf.p), Density(u0.grid, pf_next.p)));
      t = hits ? target : t + dt;
      run.record.times.push_back(t);
      run.pressure_record.times.push_back(t);
      record_tv(run.record, pf_next);
      for (std::size_t i = 0; i < N; ++i) {
        const auto r = pf_next.fraction(i);
        r_min = std::min(r_min, *std::min_element(r.begin(), r.end()));
        r_max = std::max(r_max, *std::max_element(r.begin(), r.end()));
        mass_drift = std::max(mass_drift, std::abs(mass(u0.grid, u_next.species[i]) - mass0[i]));
      }
      pf = std::move(pf_next);
      u = std::move(u_next);
      ++run.steps;
    }
    run.output_times.push_back(t);
    run.trajectory.push_back(u);
    run.pressure.emplace_back(u0.grid, pf.p);
  }

  for (const auto& [name, series] : run.record.tv) run.record.checks.push_back(check_tv_monotone(run.record, name));
  {
    CheckResult c;
    c.name = "fraction_bounds";
    c.margin = std::min(r_min, 1.0 - r_max);
    c.pass = c.margin >= 0.0;
    std::ostringstream d;
    d << "r in [" << r_min << ", " << r_max << "]";
    c.detail = d.str();
    run.record.checks.push_back(c);
  }
  {
    CheckResult c;
    c.name = "species_mass";
    c.tolerance = 1e-9;
    c.margin = c.tolerance - mass_drift;
    c.pass = c.margin >= 0.0;
    std::ostringstream d;
    d << "max drift " << mass_drift;
    c.detail = d.str();
    run.record.checks.push_back(c);
  }
  if (transport) run.record.checks.push_back(check_metric_speed(run.record, run.pressure_record, N));
  return run;
}

}  // namespace wgf
