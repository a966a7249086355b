#pragma once

// Typed access to a JSON config section. Every key read is remembered so that
// finish() can reject keys nobody asked for; all errors name the full key path.

#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "wgf/error.hpp"

namespace wgflow {

class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const {
    used_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) bad(key_path(key), "expected a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  double positive(const std::string& key, double fallback) const {
    const double v = number(key, fallback);
    if (!(v > 0.0)) bad(key_path(key), "must be positive");
    return v;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) bad(key_path(key), "expected a nonnegative integer");
    return v.get<std::size_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_string()) bad(key_path(key), "expected a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_boolean()) bad(key_path(key), "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const auto& v = at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) bad(key_path(key), "expected a number or a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) bad(key_path(key), "expected a list of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  /// Nested section; a missing key yields an empty one.
  Section child(const std::string& key) const {
    static const nlohmann::json empty = nlohmann::json::object();
    return has(key) ? Section(at(key), key_path(key)) : Section(empty, key_path(key));
  }

  const nlohmann::json& raw(const std::string& key) const { return at(key); }

  /// Rejects keys that were never read.
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) bad(key_path(k), "unknown key");
    }
  }

  [[noreturn]] static void bad(const std::string& key, const std::string& what) {
    throw wgf::Error(wgf::ErrorKind::ConfigInvalid, "'" + key + "': " + what);
  }

 private:
  const nlohmann::json& at(const std::string& key) const {
    used_.insert(key);
    if (!j_.contains(key)) bad(key_path(key), "missing");
    return j_.at(key);
  }

  const nlohmann::json& j_;
  std::string path_;
  mutable std::set<std::string> used_;
};

}  // namespace wgflow
