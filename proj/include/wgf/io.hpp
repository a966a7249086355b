#pragma once

// CSV output for densities and series, JSON for check reports.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "wgf/diagnostics.hpp"
#include "wgf/measures.hpp"
#include "wgf/skt.hpp"

namespace wgf::io {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Columns x, u1, ..., uN.
void write_densities_csv(const std::filesystem::path& path, const DensityVector& u);
/// Columns x1, x2, p in row-major order.
void write_joint_csv(const std::filesystem::path& path, const JointDensity& p);
/// Columns x, u1, u2; the two axes must coincide.
void write_marginals_csv(const std::filesystem::path& path, const MarginalPair& m);
/// Header `names`; columns[k] holds the values of names[k], all of one length.
void write_series_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& columns);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
Table read_csv(const std::filesystem::path& path);

nlohmann::json to_json(const CheckResult& c);
/// {scenario, params, checks: [{name, pass, margin, tolerance}], notes}.
nlohmann::json report_json(const std::string& scenario, const nlohmann::json& params,
                           const std::vector<CheckResult>& checks,
                           const std::map<std::string, std::string>& notes = {});
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace wgf::io
