#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wgf/diagnostics.hpp"

namespace wgflow {

struct Outcome {
  std::string scenario;
  std::vector<wgf::CheckResult> checks;
  std::map<std::string, std::string> notes;
  std::vector<std::filesystem::path> files;

  bool all_pass() const;
};

/// Scenario ids with a one-line description, in listing order.
const std::vector<std::pair<std::string, std::string>>& scenario_list();

/// Validates `config`, runs the scenario, writes its files and report.json under `out`.
/// Raises wgf::Error (ConfigInvalid for bad configs).
Outcome run_scenario(const nlohmann::json& config, const std::filesystem::path& out);

/// Sets the dotted key (e.g. "schedule.tau") to `value`, parsed as JSON when possible.
void apply_override(nlohmann::json& config, const std::string& assignment);

}  // namespace wgflow
