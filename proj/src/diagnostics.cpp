#include "wgf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wgf/error.hpp"
#include "wgf/transport1d.hpp"

namespace wgf {

std::vector<double> RunRecord::metric_speed() const {
  std::vector<double> s(w2_increment.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = w2_increment[k] / tau.at(k);
  return s;
}

bool RunRecord::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

CheckResult finish(std::string name, double margin, double tol, std::string detail) {
  CheckResult r;
  r.name = std::move(name);
  r.margin = margin;
  r.tolerance = tol;
  r.pass = margin >= 0.0;
  r.detail = std::move(detail);
  return r;
}

}  // namespace

CheckResult check_energy_monotone(const RunRecord& record) {
  const auto& E = record.energy;
  if (E.empty()) return finish("energy_monotone", 0.0, 0.0, "empty series");
  const double tol = 1e-8 * std::abs(E.front());
  double margin = std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t k = 0; k + 1 < E.size(); ++k) {
    const double m = E[k] + tol - E[k + 1];
    if (m < margin) {
      margin = m;
      worst = k;
    }
  }
  if (E.size() < 2) margin = tol;
  std::ostringstream d;
  if (margin < 0.0) d << "energy increases at step " << worst;
  return finish("energy_monotone", margin, tol, d.str());
}

CheckResult check_telescoped_w2(const RunRecord& record, double E0) {
  require(record.tau.size() >= record.w2_increment.size(), ErrorKind::DimensionMismatch, "missing step sizes");
  double sum = 0.0;
  for (std::size_t k = 0; k < record.w2_increment.size(); ++k) {
    sum += record.w2_increment[k] * record.w2_increment[k] / (2.0 * record.tau[k]);
  }
  const double tol = 1e-8 * std::max(std::abs(E0), 1.0);
  std::ostringstream d;
  d << "sum W2^2/(2 tau) = " << sum << ", E0 = " << E0;
  return finish("telescoped_w2", E0 + tol - sum, tol, d.str());
}

std::vector<std::pair<std::size_t, std::size_t>> hoelder_pairs(std::size_t n_times, std::size_t max_pairs) {
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t s = 0; s < n_times; ++s)
    for (std::size_t t = s + 1; t < n_times; ++t) all.emplace_back(s, t);
  if (all.size() <= max_pairs || max_pairs == 0) return all;
  std::vector<std::pair<std::size_t, std::size_t>> pick;
  const std::size_t stride = (all.size() + max_pairs - 1) / max_pairs;
  for (std::size_t k = 0; k < all.size() && pick.size() + 1 < max_pairs; k += stride) pick.push_back(all[k]);
  // always exercise the longest lag
  const std::pair<std::size_t, std::size_t> longest{0, n_times - 1};
  if (std::find(pick.begin(), pick.end(), longest) == pick.end()) pick.push_back(longest);
  return pick;
}

CheckResult check_hoelder(const RunRecord& record, double E0, const std::vector<DensityVector>& trajectory,
                          std::size_t levels, std::size_t max_pairs) {
  require(trajectory.size() == record.times.size(), ErrorKind::DimensionMismatch,
          "trajectory and record have different lengths");
  if (trajectory.empty()) return finish("hoelder", 0.0, 0.0, "empty trajectory");
  const double h = trajectory.front().grid.h();
  const std::size_t L = levels == 0 ? trajectory.front().grid.n_cells() : levels;
  const double tol = 1e-6 + 2.0 * (h + 1.0 / static_cast<double>(L));
  double margin = std::numeric_limits<double>::infinity();
  std::pair<std::size_t, std::size_t> worst{0, 0};
  for (const auto& [s, t] : hoelder_pairs(trajectory.size(), max_pairs)) {
    const double w = w2_product(trajectory[s], trajectory[t]);
    const double bound = std::sqrt(2.0 * std::max(E0, 0.0) * (record.times[t] - record.times[s]));
    const double m = bound + tol - w;
    if (m < margin) {
      margin = m;
      worst = {s, t};
    }
  }
  if (trajectory.size() < 2) margin = tol;
  std::ostringstream d;
  d << "tightest pair (" << worst.first << ", " << worst.second << ")";
  return finish("hoelder", margin, tol, d.str());
}

CheckResult check_entropy_dissipation(const RunRecord& record, double C, double h) {
  const auto& H = record.entropy;
  if (H.empty()) return finish("entropy_dissipation", 0.0, 0.0, "empty series");
  require(record.grad_norm_sq.size() == H.size(), ErrorKind::DimensionMismatch, "gradient series length differs");
  require(record.tau.size() + 1 >= H.size(), ErrorKind::DimensionMismatch, "missing step sizes");
  double diss = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  double tol_at = 0.0;
  std::size_t worst = 0;
  for (std::size_t k = 1; k < H.size(); ++k) {
    diss += C * record.tau[k - 1] * record.grad_norm_sq[k];
    const double tol = 1e-6 * std::abs(H.front()) + h * diss;
    const double m = (H.front() - H[k]) - diss + tol;
    if (m < margin) {
      margin = m;
      tol_at = tol;
      worst = k;
    }
  }
  if (H.size() < 2) {
    margin = 1e-6 * std::abs(H.front());
    tol_at = margin;
  }
  std::ostringstream d;
  d << "tightest at step " << worst << ", C = " << C;
  return finish("entropy_dissipation", margin, tol_at, d.str());
}

CheckResult check_tv_monotone(const RunRecord& record, const std::string& field) {
  const auto it = record.tv.find(field);
  if (it == record.tv.end()) raise(ErrorKind::UnknownField, "no TV series named '" + field + "'");
  const auto& s = it->second;
  const double tol = s.empty() ? 0.0 : 1e-8 * std::abs(s.front());
  double margin = s.size() < 2 ? tol : std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double m = s[k] + tol - s[k + 1];
    if (m < margin) {
      margin = m;
      worst = k;
    }
  }
  std::ostringstream d;
  if (margin < 0.0) d << "TV increases at step " << worst;
  return finish("tv_monotone:" + field, margin, tol, d.str());
}

CheckResult check_metric_speed(const RunRecord& species, const RunRecord& pressure, std::size_t n_species, double tol) {
  require(species.w2_increment.size() == pressure.w2_increment.size(), ErrorKind::DimensionMismatch,
          "species and pressure records have different step counts");
  const double root = std::sqrt(static_cast<double>(n_species));
  double margin = species.w2_increment.empty() ? tol : std::numeric_limits<double>::infinity();
  std::size_t worst = 0;
  for (std::size_t k = 0; k < species.w2_increment.size(); ++k) {
    const double m = root * pressure.w2_increment[k] + tol - species.w2_increment[k];
    if (m < margin) {
      margin = m;
      worst = k;
    }
  }
  std::ostringstream d;
  d << "tightest at step " << worst;
  return finish("metric_speed", margin, tol, d.str());
}

}  // namespace wgf
