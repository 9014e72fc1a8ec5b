#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace plslab {

using Json = nlohmann::json;

/// Read-only view of one object in a JSON config that remembers which keys
/// were consumed. finish() rejects leftovers, naming the full dotted path.
/// Every failure throws Error(ErrorKind::Config) with that path attached.
class ConfigNode {
 public:
  ConfigNode(const Json& json, std::string path);

  const std::string& path() const noexcept { return path_; }
  bool has(std::string_view key) const;

  double number(std::string_view key);
  double number_or(std::string_view key, double fallback);
  std::int64_t integer(std::string_view key);
  std::int64_t integer_or(std::string_view key, std::int64_t fallback);
  bool boolean_or(std::string_view key, bool fallback);
  std::string string(std::string_view key);
  std::string string_or(std::string_view key, std::string fallback);
  std::vector<double> numbers(std::string_view key);
  std::vector<double> numbers_or(std::string_view key, std::vector<double> fallback);

  ConfigNode child(std::string_view key);
  std::optional<ConfigNode> optional_child(std::string_view key);
  /// Raw JSON for a key (marks it consumed).
  const Json& raw(std::string_view key);
  std::vector<Json> array(std::string_view key);

  std::string key_path(std::string_view key) const;
  void finish() const;

 private:
  const Json& lookup(std::string_view key);

  const Json* json_;
  std::string path_;
  std::set<std::string, std::less<>> used_;
};

}  // namespace plslab
