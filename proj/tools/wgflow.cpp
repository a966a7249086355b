// wgflow: config-driven runner for the gradient-flow scenarios.
//
//   wgflow list
//   wgflow run cfg.json [more.json ...] [--override key=value]... [--out dir] [--jobs n]
//
// Exit codes: 0 all checks pass, 1 configuration or solver error, 2 a check failed.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scenarios.hpp"
#include "wgf/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kCheckFailed = 2;

json load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw wgf::Error(wgf::ErrorKind::ConfigInvalid, "cannot open config '" + path.string() + "'");
  json j = json::parse(in, nullptr, false, true);
  if (j.is_discarded()) throw wgf::Error(wgf::ErrorKind::ConfigInvalid, "'" + path.string() + "': not valid JSON");
  return j;
}

std::string summary(const fs::path& config, const wgflow::Outcome& o, const fs::path& out) {
  std::ostringstream s;
  s << config.string() << ": scenario " << o.scenario << " -> " << out.string() << "\n";
  for (const auto& c : o.checks) {
    char line[256];
    std::snprintf(line, sizeof line, "  [%s] %-28s margin %.3e  tol %.3e", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                  c.margin, c.tolerance);
    s << line;
    if (!c.pass && !c.detail.empty()) s << "  (" << c.detail << ")";
    s << "\n";
  }
  s << "  " << std::count_if(o.checks.begin(), o.checks.end(), [](const auto& c) { return c.pass; }) << "/"
    << o.checks.size() << " checks pass\n";
  return s.str();
}

int run_one(const fs::path& config_path, const std::vector<std::string>& overrides, const fs::path& out,
            const fs::path& fallback, std::string& log) {
  try {
    json config = load_config(config_path);
    for (const auto& ov : overrides) wgflow::apply_override(config, ov);
    fs::path dir = out;
    if (dir.empty()) {
      dir = fallback;
      if (config.is_object() && config.contains("output") && config["output"].is_string())
        dir = config["output"].get<std::string>();
    }
    const auto o = wgflow::run_scenario(config, dir);
    log = summary(config_path, o, dir);
    return o.all_pass() ? kOk : kCheckFailed;
  } catch (const wgf::Error& e) {
    log = config_path.string() + ": error: " + e.what() + "\n";
  } catch (const std::exception& e) {
    log = config_path.string() + ": error: " + e.what() + "\n";
  }
  return kError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein gradient-flow scenario runner"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List scenario ids");

  auto* run = app.add_subcommand("run", "Run one or more scenario configs");
  std::vector<std::string> configs;
  std::vector<std::string> overrides;
  std::string out;
  unsigned jobs = 1;
  run->add_option("config", configs, "JSON config file(s)")->required()->check(CLI::ExistingFile);
  run->add_option("--override", overrides, "Set a config key, e.g. schedule.tau=0.001 (repeatable)");
  run->add_option("--out", out, "Output directory (one subdirectory per config when several are given)");
  run->add_option("--jobs", jobs, "Configs run concurrently")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kError;
  }

  if (list->parsed()) {
    for (const auto& [id, what] : wgflow::scenario_list()) std::printf("%-22s %s\n", id.c_str(), what.c_str());
    return kOk;
  }

  // several configs never share a directory
  std::vector<fs::path> dirs(configs.size()), fallbacks(configs.size());
  for (std::size_t k = 0; k < configs.size(); ++k) {
    const fs::path base = out.empty() ? fs::path("out") : fs::path(out);
    const fs::path dir = configs.size() == 1 ? base : base / fs::path(configs[k]).stem();
    fallbacks[k] = dir;
    if (!out.empty()) dirs[k] = dir;
  }

  std::vector<int> codes(configs.size(), kOk);
  std::vector<std::string> logs(configs.size());
  std::atomic<std::size_t> next{0};
  std::mutex print;
  auto worker = [&] {
    for (std::size_t k; (k = next++) < configs.size();) {
      codes[k] = run_one(configs[k], overrides, dirs[k], fallbacks[k], logs[k]);
      std::lock_guard<std::mutex> lock(print);
      std::fputs(logs[k].c_str(), codes[k] == kError ? stderr : stdout);
    }
  };
  const unsigned n_threads = std::min<unsigned>(jobs, static_cast<unsigned>(configs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (std::find(codes.begin(), codes.end(), kError) != codes.end()) return kError;
  if (std::find(codes.begin(), codes.end(), kCheckFailed) != codes.end()) return kCheckFailed;
  return kOk;
}
