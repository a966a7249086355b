#include "wgf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wgf/error.hpp"

namespace wgf::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  require(f.good(), ErrorKind::InvalidArgument, "cannot write " + path.string());
  return f;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_densities_csv(const std::filesystem::path& path, const DensityVector& u) {
  auto f = open_out(path);
  f << "x";
  for (std::size_t i = 0; i < u.n_species(); ++i) f << ",u" << i + 1;
  f << '\n';
  for (std::size_t c = 0; c < u.grid.n_cells(); ++c) {
    f << format_double(u.grid.center(c));
    for (const auto& s : u.species) f << ',' << format_double(s[c]);
    f << '\n';
  }
}

void write_joint_csv(const std::filesystem::path& path, const JointDensity& p) {
  auto f = open_out(path);
  f << "x1,x2,p\n";
  for (std::size_t i = 0; i < p.grid.n1(); ++i) {
    for (std::size_t j = 0; j < p.grid.n2(); ++j) {
      f << format_double(p.grid.axis1.center(i)) << ',' << format_double(p.grid.axis2.center(j)) << ','
        << format_double(p.at(i, j)) << '\n';
    }
  }
}

void write_marginals_csv(const std::filesystem::path& path, const MarginalPair& m) {
  require(m.u1.grid == m.u2.grid, ErrorKind::DimensionMismatch, "marginals live on different axes");
  auto f = open_out(path);
  f << "x,u1,u2\n";
  for (std::size_t c = 0; c < m.u1.size(); ++c)
    f << format_double(m.u1.grid.center(c)) << ',' << format_double(m.u1[c]) << ',' << format_double(m.u2[c]) << '\n';
}

void write_series_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& columns) {
  require(names.size() == columns.size() && !names.empty(), ErrorKind::DimensionMismatch,
          "series names and columns differ in number");
  for (const auto& c : columns)
    require(c.size() == columns.front().size(), ErrorKind::DimensionMismatch, "series columns differ in length");
  auto f = open_out(path);
  for (std::size_t k = 0; k < names.size(); ++k) f << (k ? "," : "") << names[k];
  f << '\n';
  for (std::size_t r = 0; r < columns.front().size(); ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k) f << (k ? "," : "") << format_double(columns[k][r]);
    f << '\n';
  }
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(f.good(), ErrorKind::InvalidArgument, "cannot read " + path.string());
  Table t;
  std::string line;
  if (std::getline(f, line)) {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      require(r.ec == std::errc(), ErrorKind::InvalidArgument, "malformed number '" + cell + "' in " + path.string());
      row.push_back(v);
    }
    require(row.size() == t.header.size(), ErrorKind::DimensionMismatch, "ragged row in " + path.string());
    t.rows.push_back(std::move(row));
  }
  return t;
}

nlohmann::json to_json(const CheckResult& c) {
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"name", c.name}, {"pass", c.pass}, {"margin", finite(c.margin)}, {"tolerance", finite(c.tolerance)},
          {"detail", c.detail}};
}

nlohmann::json report_json(const std::string& scenario, const nlohmann::json& params,
                           const std::vector<CheckResult>& checks, const std::map<std::string, std::string>& notes) {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["params"] = params;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) j["checks"].push_back(to_json(c));
  j["notes"] = notes;
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

}  // namespace wgf::io
