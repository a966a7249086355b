#include "wgf/jko.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "wgf/error.hpp"
#include "wgf/isotonic.hpp"
#include "wgf/kernels.hpp"
#include "wgf/transport1d.hpp"

namespace wgf {

JKOSchedule JKOSchedule::uniform(double tau, std::size_t steps) { return {std::vector<double>(steps, tau)}; }

double JKOSchedule::horizon() const noexcept { return std::accumulate(tau.begin(), tau.end(), 0.0); }

double JKOSchedule::sup() const noexcept {
  return tau.empty() ? 0.0 : *std::max_element(tau.begin(), tau.end());
}

void JKOSchedule::validate() const {
  for (std::size_t k = 0; k < tau.size(); ++k) {
    require(tau[k] > 0.0 && std::isfinite(tau[k]), ErrorKind::InvalidArgument,
            "schedule: step " + std::to_string(k) + " has nonpositive tau");
  }
}

LagrangianState LagrangianState::from_density(const DensityVector& u, std::size_t levels) {
  LagrangianState s{u.grid, {}};
  for (std::size_t i = 0; i < u.n_species(); ++i) s.knots.push_back(to_quantiles(u.component(i), levels));
  return s;
}

DensityVector LagrangianState::density() const {
  DensityVector u(grid, knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) u.species[i] = to_density(knots[i], grid).values;
  return u;
}

namespace {

// ---------------------------------------------------------------------------
// Lagrangian solver: knot geometry and the deposition Jacobian

struct Segment {
  double a, b, w;
  std::array<std::size_t, 2> ka{};
  std::array<double, 2> ca{};
  std::size_t na = 0;
  std::array<std::size_t, 2> kb{};
  std::array<double, 2> cb{};
  std::size_t nb = 0;
};

// Intervals of the deposition model with the affine dependence of their ends on the knots.
std::vector<Segment> build_segments(const std::vector<double>& X, const Grid1D& g) {
  const std::size_t L = X.size();
  const double w = 1.0 / static_cast<double>(L);
  std::vector<Segment> segs;
  segs.reserve(L + 1);

  Segment left{};
  left.w = 0.5 * w;
  left.b = X[0];
  left.kb = {0, 0};
  left.cb = {1.0, 0.0};
  left.nb = 1;
  if (L > 1) {
    const double raw = 1.5 * X[0] - 0.5 * X[1];
    if (raw > g.x_min()) {
      left.a = raw;
      left.ka = {0, 1};
      left.ca = {1.5, -0.5};
      left.na = 2;
    } else {
      left.a = g.x_min();
    }
  } else {
    left.a = X[0];
    left.ka = {0, 0};
    left.ca = {1.0, 0.0};
    left.na = 1;
  }
  segs.push_back(left);

  for (std::size_t l = 0; l + 1 < L; ++l) {
    Segment s{};
    s.a = X[l];
    s.b = X[l + 1];
    s.w = w;
    s.ka = {l, 0};
    s.ca = {1.0, 0.0};
    s.na = 1;
    s.kb = {l + 1, 0};
    s.cb = {1.0, 0.0};
    s.nb = 1;
    segs.push_back(s);
  }

  Segment right{};
  right.w = 0.5 * w;
  right.a = X[L - 1];
  right.ka = {L - 1, 0};
  right.ca = {1.0, 0.0};
  right.na = 1;
  if (L > 1) {
    const double raw = 1.5 * X[L - 1] - 0.5 * X[L - 2];
    if (raw < g.x_max()) {
      right.b = raw;
      right.kb = {L - 1, L - 2};
      right.cb = {1.5, -0.5};
      right.nb = 2;
    } else {
      right.b = g.x_max();
    }
  } else {
    right.b = X[0];
    right.kb = {0, 0};
    right.cb = {1.0, 0.0};
    right.nb = 1;
  }
  segs.push_back(right);
  return segs;
}

struct Entry {
  std::size_t knot;
  std::size_t cell;
  double value;
};

// d(cell mass)/d(knot) for every segment, through d/da and d/db of the hat-weighted averages.
void append_jacobian(const Segment& s, const Grid1D& g, std::vector<Entry>& out) {
  const std::size_t n = g.n_cells();
  const double h = g.h();
  const double inv_h = 1.0 / h;
  auto emit = [&](std::size_t cell, double da, double db) {
    for (std::size_t r = 0; r < s.na; ++r) out.push_back({s.ka[r], cell, s.ca[r] * da});
    for (std::size_t r = 0; r < s.nb; ++r) out.push_back({s.kb[r], cell, s.cb[r] * db});
  };
  if (!(s.b > s.a)) {
    const double pos = (s.a - g.x_min()) / h - 0.5;
    if (pos <= 0.0 || pos >= static_cast<double>(n - 1)) return;
    const auto k = static_cast<std::size_t>(pos);
    const double half = 0.5 * s.w * inv_h;
    emit(k + 1, half, half);
    emit(k, -half, -half);
    return;
  }
  const double len = s.b - s.a;
  const double x0 = g.center(0);
  const double lo = std::max(s.a, x0);
  const double hi = std::min(s.b, g.center(n - 1));
  if (!(hi > lo)) return;
  auto k = static_cast<std::size_t>(std::clamp(std::floor((lo - x0) / h), 0.0, static_cast<double>(n - 2)));
  for (; k + 1 < n; ++k) {
    const double ck = g.center(k);
    const double ck1 = g.center(k + 1);
    const double lft = std::max(lo, ck);
    const double rgt = std::min(hi, ck1);
    if (rgt > lft) {
      const double frac = (rgt - lft) / len;
      const double rb = (rgt + lft - 2.0 * s.a) / (2.0 * len);
      const double ra = (2.0 * s.b - rgt - lft) / (2.0 * len);
      const double base = s.w * frac * inv_h;
      emit(k + 1, base * ra, base * rb);
      emit(k, -base * ra, -base * rb);
    }
    if (ck1 >= hi) break;
  }
}

// Banded SPD matrix, lower band stored row-wise: at(k, j) = H(k, k − j), 0 <= j <= bw.
class BandMatrix {
 public:
  BandMatrix(std::size_t n, std::size_t bw) : n_(n), bw_(bw), v_(n * (bw + 1), 0.0) {}
  double& at(std::size_t row, std::size_t col) { return v_[row * (bw_ + 1) + (row - col)]; }
  double get(std::size_t row, std::size_t col) const { return v_[row * (bw_ + 1) + (row - col)]; }
  std::size_t bw() const { return bw_; }

  void add(std::size_t r, std::size_t c, double x) {
    if (r >= c) at(r, c) += x;
  }

  // in-place Cholesky; returns false if a pivot is not positive
  bool factor() {
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t j0 = k > bw_ ? k - bw_ : 0;
      for (std::size_t j = j0; j <= k; ++j) {
        double s = get(k, j);
        const std::size_t m0 = std::max(j0, j > bw_ ? j - bw_ : 0);
        for (std::size_t m = m0; m < j; ++m) s -= get(k, m) * get(j, m);
        if (j == k) {
          if (!(s > 0.0)) return false;
          at(k, k) = std::sqrt(s);
        } else {
          at(k, j) = s / get(j, j);
        }
      }
    }
    return true;
  }

  void solve(std::vector<double>& x) const {
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t j0 = k > bw_ ? k - bw_ : 0;
      double s = x[k];
      for (std::size_t j = j0; j < k; ++j) s -= get(k, j) * x[j];
      x[k] = s / get(k, k);
    }
    for (std::size_t k = n_; k-- > 0;) {
      double s = x[k];
      const std::size_t j1 = std::min(n_ - 1, k + bw_);
      for (std::size_t j = k + 1; j <= j1; ++j) s -= get(j, k) * x[j];
      x[k] = s / get(k, k);
    }
  }

 private:
  std::size_t n_;
  std::size_t bw_;
  std::vector<double> v_;
};

class LagrangianProblem {
 public:
  LagrangianProblem(const LagrangianState& prev, const CouplingMatrix& A, double tau, bool dirichlet)
      : g_(prev.grid), A_(A), tau_(tau), dirichlet_(dirichlet), prev_(prev) {
    N_ = prev.knots.size();
    L_ = prev.levels();
    inv_tl_ = 1.0 / (tau * static_cast<double>(L_));
  }

  std::size_t species() const { return N_; }

  DensityVector deposit(const std::vector<std::vector<double>>& X) const {
    DensityVector u(g_, N_);
    for (std::size_t i = 0; i < N_; ++i) u.species[i] = to_density(QuantileMap{X[i]}, g_).values;
    return u;
  }

  double energy(const DensityVector& u) const {
    double e = energy_quadratic(u, A_);
    if (dirichlet_) e += energy_dirichlet(u);
    return e;
  }

  double transport_term(const std::vector<std::vector<double>>& X) const {
    double s = 0.0;
    for (std::size_t i = 0; i < N_; ++i) {
      s += kernels::sum_sq_diff(X[i].data(), prev_.knots[i].positions.data(), L_);
    }
    return 0.5 * inv_tl_ * s;
  }

  double objective(const std::vector<std::vector<double>>& X, const DensityVector& u) const {
    return transport_term(X) + energy(u);
  }

  // Gradient and Gauss-Newton direction for species i at the current deposit.
  void direction(std::size_t i, const std::vector<double>& X, const DensityVector& u,
                 const std::vector<std::vector<double>>& p, std::vector<double>& grad, std::vector<double>& dir,
                 bool& newton_ok) const {
    const std::size_t n = g_.n_cells();
    const double h = g_.h();
    std::vector<double> mu = p[i];
    if (dirichlet_) {
      const auto& s = u.species[i];
      for (std::size_t c = 0; c < n; ++c) {
        const double lo = c > 0 ? s[c - 1] : s[c];
        const double hi = c + 1 < n ? s[c + 1] : s[c];
        mu[c] -= ((hi + lo) - 2.0 * s[c]) / (h * h);
      }
    }

    std::vector<Entry> J;
    J.reserve(8 * (L_ + 1));
    for (const Segment& s : build_segments(X, g_)) append_jacobian(s, g_, J);

    grad.assign(L_, 0.0);
    const auto& Xp = prev_.knots[i].positions;
    for (std::size_t l = 0; l < L_; ++l) grad[l] = (X[l] - Xp[l]) * inv_tl_;
    for (const Entry& e : J) grad[e.knot] += e.value * mu[e.cell];

    // Gauss-Newton model: I/(tau L) + J^T M J, M the Hessian of the energy in cell masses
    std::stable_sort(J.begin(), J.end(), [](const Entry& x, const Entry& y) { return x.cell < y.cell; });
    std::vector<std::size_t> start(n + 1, 0);
    for (const Entry& e : J) ++start[e.cell + 1];
    for (std::size_t c = 0; c < n; ++c) start[c + 1] += start[c];

    std::size_t bw = 0;
    auto span_of = [&](std::size_t c0, std::size_t c1) {
      std::size_t lo = L_, hi = 0;
      for (std::size_t c = c0; c <= c1; ++c)
        for (std::size_t q = start[c]; q < start[c + 1]; ++q) {
          lo = std::min(lo, J[q].knot);
          hi = std::max(hi, J[q].knot);
        }
      return hi >= lo ? hi - lo : std::size_t{0};
    };
    for (std::size_t c = 0; c < n; ++c) {
      bw = std::max(bw, span_of(c, dirichlet_ && c + 1 < n ? c + 1 : c));
    }

    BandMatrix H(L_, bw);
    for (std::size_t l = 0; l < L_; ++l) H.at(l, l) = inv_tl_;
    const double d_self = A_(i, i) / h;
    const double inv_h3 = 1.0 / (h * h * h);
    for (std::size_t c = 0; c < n; ++c) {
      double d = d_self;
      if (dirichlet_) d += (c > 0 ? inv_h3 : 0.0) + (c + 1 < n ? inv_h3 : 0.0);
      for (std::size_t q = start[c]; q < start[c + 1]; ++q)
        for (std::size_t r = start[c]; r < start[c + 1]; ++r) H.add(J[q].knot, J[r].knot, d * J[q].value * J[r].value);
      if (dirichlet_ && c + 1 < n) {
        for (std::size_t q = start[c]; q < start[c + 1]; ++q)
          for (std::size_t r = start[c + 1]; r < start[c + 2]; ++r) {
            const double x = -inv_h3 * J[q].value * J[r].value;
            H.add(J[q].knot, J[r].knot, x);
            H.add(J[r].knot, J[q].knot, x);
          }
      }
    }
    dir.resize(L_);
    for (std::size_t l = 0; l < L_; ++l) dir[l] = -grad[l];
    newton_ok = H.factor();
    if (newton_ok) H.solve(dir);
  }

  void project(std::vector<double>& x) const {
    project_monotone(x);
    for (double& v : x) v = std::clamp(v, g_.x_min(), g_.x_max());
  }

 private:
  Grid1D g_;
  const CouplingMatrix& A_;
  double tau_;
  bool dirichlet_;
  const LagrangianState& prev_;
  std::size_t N_ = 0;
  std::size_t L_ = 0;
  double inv_tl_ = 0.0;
};

// ---------------------------------------------------------------------------
// entropic solver helpers

// Root of l + exp(l) = R (l = log of the Lambert W of e^R), safeguarded Newton.
double solve_log_lambert(double R) {
  double lo, hi;
  if (R > 1.0) {
    lo = 0.0;
    hi = std::log(R);
  } else {
    lo = R - std::exp(1.0);
    hi = R;
  }
  double l = R > 1.0 ? std::log(R) - std::log(R) / (1.0 + R) : R - std::exp(R) / (1.0 + std::exp(R));
  const double tol = 1e-12 * std::max(1.0, std::abs(R));
  for (int it = 0; it < 100; ++it) {
    const double el = std::exp(l);
    const double f = l + el - R;
    if (std::abs(f) <= tol) return l;
    if (f > 0.0) hi = l;
    else lo = l;
    double next = l - f / (1.0 + el);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    l = next;
  }
  return l;
}

}  // namespace

LagrangianStep jko_step_lagrangian(const LagrangianState& prev, const CouplingMatrix& A, double tau,
                                   const JKOOptions& opts) {
  require(tau > 0.0, ErrorKind::InvalidArgument, "tau must be positive");
  require(prev.knots.size() == A.size(), ErrorKind::DimensionMismatch, "species count differs from the matrix size");
  if (!A.positive_definite() || !A.symmetric()) {
    raise(ErrorKind::NotPositiveDefinite, "JKO solvers need a symmetric positive definite coupling matrix (lambda_min = " +
                                              std::to_string(A.lambda_min()) + ")");
  }
  const std::size_t N = prev.knots.size();
  LagrangianProblem P(prev, A, tau, opts.with_dirichlet);

  std::vector<std::vector<double>> X(N);
  for (std::size_t i = 0; i < N; ++i) X[i] = prev.knots[i].positions;
  DensityVector u = P.deposit(X);
  double phi = P.objective(X, u);

  JKOStepReport rep;
  rep.energy_before = P.energy(u);
  rep.objective_before = phi;

  const std::size_t cap = opts.fixed_iterations > 0 ? opts.fixed_iterations : opts.max_iter;
  const double c_armijo = 1e-4;
  double grad_step = tau * static_cast<double>(prev.levels());
  std::size_t increases = 0;
  std::vector<std::vector<double>> grad(N), dir(N), trial(N);
  std::size_t it = 0;
  for (; it < cap; ++it) {
    const auto p = pressure(u, A);
    bool all_newton = true;
    for (std::size_t i = 0; i < N; ++i) {
      bool ok = false;
      P.direction(i, X[i], u, p, grad[i], dir[i], ok);
      all_newton = all_newton && ok;
    }

    auto try_direction = [&](const std::vector<std::vector<double>>& d, double alpha0, int max_halvings, double& alpha_used,
                             double& phi_new, DensityVector& u_new) {
      double alpha = alpha0;
      for (int k = 0; k < max_halvings; ++k, alpha *= 0.5) {
        double slope = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
          trial[i] = X[i];
          for (std::size_t l = 0; l < trial[i].size(); ++l) trial[i][l] += alpha * d[i][l];
          P.project(trial[i]);
          double s = 0.0;
          for (std::size_t l = 0; l < trial[i].size(); ++l) s += grad[i][l] * (trial[i][l] - X[i][l]);
          slope += s;
        }
        if (!(slope < 0.0)) continue;
        u_new = P.deposit(trial);
        phi_new = P.objective(trial, u_new);
        if (phi_new <= phi + c_armijo * slope) {
          alpha_used = alpha;
          return true;
        }
      }
      return false;
    };

    double alpha = 0.0;
    double phi_new = phi;
    DensityVector u_new = u;
    bool accepted = all_newton && try_direction(dir, 1.0, 30, alpha, phi_new, u_new);
    if (!accepted) {
      std::vector<std::vector<double>> neg(N);
      for (std::size_t i = 0; i < N; ++i) {
        neg[i] = grad[i];
        for (double& v : neg[i]) v = -v;
      }
      accepted = try_direction(neg, 2.0 * grad_step, 60, alpha, phi_new, u_new);
      if (accepted) grad_step = alpha;
    }
    if (!accepted) {
      rep.converged = true;  // no admissible decrease at working precision
      break;
    }
    if (phi_new > phi) {
      if (++increases >= 10) raise(ErrorKind::InnerDiverged, "objective increased over 10 consecutive accepted steps");
    } else {
      increases = 0;
    }
    const double decrease = phi - phi_new;
    X.swap(trial);
    u = std::move(u_new);
    phi = phi_new;
    if (opts.fixed_iterations == 0 && decrease < opts.tol_obj * std::abs(phi)) {
      rep.converged = true;
      ++it;
      break;
    }
  }
  if (opts.fixed_iterations > 0) rep.converged = true;

  LagrangianStep out{LagrangianState{prev.grid, {}}, std::move(u), {}};
  for (std::size_t i = 0; i < N; ++i) out.state.knots.push_back(QuantileMap{X[i]});
  rep.inner_iterations = it;
  rep.objective_after = phi;
  rep.energy_after = P.energy(out.u);
  require(rep.energy_after <= rep.energy_before + 1e-12 * std::abs(rep.energy_before), ErrorKind::CheckFailed,
          "energy increased across a JKO step");
  // the quantile-sample distance the step minimizes; cell-atom distances carry an O(sqrt(h)) floor
  rep.w2_increment = std::sqrt(2.0 * tau * P.transport_term(X));
  out.report = rep;
  return out;
}

std::pair<DensityVector, JKOStepReport> jko_step_lagrangian(const DensityVector& u_prev, const CouplingMatrix& A,
                                                            double tau, const JKOOptions& opts) {
  auto step = jko_step_lagrangian(LagrangianState::from_density(u_prev, opts.levels), A, tau, opts);
  if (opts.compute_residual) {
    step.report.optimality_residual = optimality_residual(u_prev, step.u, A, tau, opts.support_threshold).residual;
  }
  return {std::move(step.u), std::move(step.report)};
}

std::pair<DensityVector, JKOStepReport> jko_step_entropic(const DensityVector& u_prev, const CouplingMatrix& A,
                                                          double tau, double epsilon, const JKOOptions& opts) {
  require(tau > 0.0, ErrorKind::InvalidArgument, "tau must be positive");
  require(epsilon > 0.0, ErrorKind::InvalidArgument, "epsilon must be positive");
  require(u_prev.n_species() == A.size(), ErrorKind::DimensionMismatch, "species count differs from the matrix size");
  if (!A.positive_definite() || !A.symmetric()) {
    raise(ErrorKind::NotPositiveDefinite, "JKO solvers need a symmetric positive definite coupling matrix");
  }
  const Grid1D& g = u_prev.grid;
  const std::size_t n = g.n_cells();
  const std::size_t N = u_prev.n_species();
  const double h = g.h();
  if (h * h / epsilon > 700.0) {
    raise(ErrorKind::KernelUnderflow, "Gibbs kernel exp(-h^2/eps) underflows between neighbouring cells (h^2/eps = " +
                                          std::to_string(h * h / epsilon) + "); increase epsilon or refine the grid");
  }

  std::vector<double> C(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      const double d = g.center(x) - g.center(y);
      C[x * n + y] = d * d;
    }
  const double inv_eps = 1.0 / epsilon;
  const double sigma = 2.0 * tau / epsilon;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> log_mu(N, std::vector<double>(n)), f(N, std::vector<double>(n, 0.0)),
      gpot(N, std::vector<double>(n, 0.0)), nu(N, std::vector<double>(n));
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t c = 0; c < n; ++c) {
      const double m = u_prev.species[i][c] * h;
      log_mu[i][c] = m > 0.0 ? std::log(m) : neg_inf;
      nu[i][c] = m;
    }
  }

  auto update_f = [&](std::size_t i) {
    for (std::size_t x = 0; x < n; ++x) {
      f[i][x] = log_mu[i][x] == neg_inf ? neg_inf
                                        : epsilon * (log_mu[i][x] - kernels::lse_affine(gpot[i].data(), &C[x * n], inv_eps, n));
    }
  };

  JKOStepReport rep;
  std::vector<double> log_q(n), s(n);
  std::size_t outer = 0;
  bool converged = false;
  for (; outer < opts.max_outer; ++outer) {
    double change = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      // frozen cross pressure from the other species' current second marginals
      std::fill(s.begin(), s.end(), 0.0);
      for (std::size_t j = 0; j < N; ++j) {
        if (j == i || A(i, j) == 0.0) continue;
        for (std::size_t c = 0; c < n; ++c) s[c] += A(i, j) * nu[j][c] / h;
      }
      update_f(i);
      const double k = sigma * A(i, i) / h;
      const double log_k = std::log(k);
      for (std::size_t y = 0; y < n; ++y) {
        log_q[y] = kernels::lse_affine(f[i].data(), &C[y * n], inv_eps, n);
        const double r = log_q[y] - sigma * s[y];
        const double t = solve_log_lambert(r + log_k) - log_k;
        const double v = std::exp(t);
        change += std::abs(v - nu[i][y]);
        nu[i][y] = v;
        gpot[i][y] = epsilon * (t - log_q[y]);
      }
    }
    if (change < opts.tol_fix) {
      converged = true;
      ++outer;
      break;
    }
  }
  if (!converged) {
    raise(ErrorKind::InnerDiverged, "entropic solver did not reach tol_fix within " + std::to_string(opts.max_outer) +
                                        " outer iterations");
  }

  DensityVector out(g, N);
  for (std::size_t i = 0; i < N; ++i) {
    update_f(i);
    double total = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      const double m = std::exp(gpot[i][y] * inv_eps + kernels::lse_affine(f[i].data(), &C[y * n], inv_eps, n));
      out.species[i][y] = m / h;
      total += m;
    }
    const double target = mass(g, u_prev.species[i]);
    require(std::abs(total - target) <= 1e-10 * std::max(1.0, target), ErrorKind::InnerDiverged,
            "entropic plan lost mass: drift " + std::to_string(total - target));
    for (double& v : out.species[i]) v *= target / total;
  }

  rep.inner_iterations = outer;
  rep.converged = true;
  rep.energy_before = energy_quadratic(u_prev, A);
  rep.energy_after = energy_quadratic(out, A);
  rep.w2_increment = w2_product(u_prev, out);
  rep.objective_before = rep.energy_before;
  rep.objective_after = rep.w2_increment * rep.w2_increment / (2.0 * tau) + rep.energy_after;
  if (opts.compute_residual) rep.optimality_residual = optimality_residual(u_prev, out, A, tau, opts.support_threshold).residual;
  return {std::move(out), std::move(rep)};
}

ResidualReport optimality_residual(const DensityVector& u_prev, const DensityVector& u_next, const CouplingMatrix& A,
                                   double tau, double support_threshold) {
  require(u_prev.n_species() == u_next.n_species(), ErrorKind::DimensionMismatch, "species counts differ");
  const auto p = pressure(u_next, A);
  const Grid1D& g = u_next.grid;
  const std::size_t n = g.n_cells();
  const double thr = support_threshold / g.h();
  ResidualReport rep;
  for (std::size_t i = 0; i < u_next.n_species(); ++i) {
    const auto phi = kantorovich_potential_1d(u_next.component(i), u_prev.component(i));
    std::vector<double> v(n);
    for (std::size_t c = 0; c < n; ++c) v[c] = phi.values[c] / tau + p[i][c];
    double sum = 0.0, sum_p = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (u_next.species[i][c] > thr) {
        sum += v[c];
        sum_p += std::abs(p[i][c]);
        ++count;
      }
    }
    if (count == 0) raise(ErrorKind::DegenerateSupport, "species " + std::to_string(i) + " has empty support");
    const double C = sum / static_cast<double>(count);
    const double scale = sum_p / static_cast<double>(count);
    double var = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      if (u_next.species[i][c] > thr) var += (v[c] - C) * (v[c] - C);
    }
    const double sd = std::sqrt(var / static_cast<double>(count));
    rep.residual.push_back(scale > 0.0 ? sd / scale : sd);
    rep.constant.push_back(C);
    std::size_t bad = 0;
    const double tol = 1e-6 * std::max(scale, 1.0);
    for (std::size_t c = 0; c < n; ++c) {
      if (u_next.species[i][c] > thr) continue;
      const double gap = v[c] - C;
      rep.worst_off_support = std::min(rep.worst_off_support, gap);
      if (gap < -tol) ++bad;
    }
    rep.off_support_violations.push_back(bad);
  }
  return rep;
}

JKORun run_jko(const DensityVector& u0, const CouplingMatrix& A, const JKOSchedule& schedule, JKOSolver solver,
               const JKOOptions& opts) {
  schedule.validate();
  const double E0_raw = energy_quadratic(u0, A);
  const double H0_raw = entropy_boltzmann(u0);
  require(std::isfinite(E0_raw), ErrorKind::InvalidArgument, "initial energy is not finite");
  require(std::isfinite(H0_raw), ErrorKind::InvalidArgument, "initial entropy is not finite");

  JKORun run;
  const std::size_t L = opts.levels == 0 ? u0.grid.n_cells() : opts.levels;
  auto energy_of = [&](const DensityVector& u) {
    double e = energy_quadratic(u, A);
    if (opts.with_dirichlet) e += energy_dirichlet(u);
    return e;
  };
  auto record_state = [&](const DensityVector& u, double t) {
    run.record.times.push_back(t);
    run.record.energy.push_back(energy_of(u));
    run.record.entropy.push_back(entropy_boltzmann(u));
    run.record.grad_norm_sq.push_back(gradient_norm_sq(u));
    run.trajectory.push_back(u);
  };

  LagrangianState state{u0.grid, {}};
  if (solver == JKOSolver::Lagrangian) {
    state = LagrangianState::from_density(u0, L);
    record_state(schedule.tau.empty() ? u0 : state.density(), 0.0);
  } else {
    record_state(u0, 0.0);
  }

  double t = 0.0;
  for (double tau : schedule.tau) {
    const DensityVector& prev = run.trajectory.back();
    JKOStepReport rep;
    DensityVector next(u0.grid, u0.n_species());
    if (solver == JKOSolver::Lagrangian) {
      auto step = jko_step_lagrangian(state, A, tau, opts);
      state = std::move(step.state);
      next = std::move(step.u);
      rep = std::move(step.report);
      if (opts.compute_residual) rep.optimality_residual = optimality_residual(prev, next, A, tau, opts.support_threshold).residual;
    } else {
      auto step = jko_step_entropic(prev, A, tau, opts.epsilon, opts);
      next = std::move(step.first);
      rep = std::move(step.second);
    }
    t += tau;
    run.record.tau.push_back(tau);
    run.record.w2_increment.push_back(rep.w2_increment);
    run.record.residual.push_back(rep.optimality_residual);
    run.steps.push_back(rep);
    record_state(next, t);
  }

  run.record.notes["solver"] = solver == JKOSolver::Lagrangian ? "lagrangian" : "entropic";
  run.record.notes["levels"] = std::to_string(L);
  const double E0 = run.record.energy.front();
  run.record.checks.push_back(check_energy_monotone(run.record));
  run.record.checks.push_back(check_telescoped_w2(run.record, E0));
  run.record.checks.push_back(check_hoelder(run.record, E0, run.trajectory, L));
  run.record.checks.push_back(check_entropy_dissipation(run.record, A.lambda_min(), u0.grid.h()));
  return run;
}

}  // namespace wgf
