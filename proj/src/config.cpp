#include "plslab/config.hpp"

#include "plslab/error.hpp"

namespace plslab {

ConfigNode::ConfigNode(const Json& json, std::string path) : json_(&json), path_(std::move(path)) {
  if (!json.is_object()) throw Error(ErrorKind::Config, "expected an object", path_);
}

std::string ConfigNode::key_path(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

bool ConfigNode::has(std::string_view key) const { return json_->contains(std::string(key)); }

const Json& ConfigNode::lookup(std::string_view key) {
  const auto it = json_->find(std::string(key));
  if (it == json_->end()) throw Error(ErrorKind::Config, "missing required entry", key_path(key));
  used_.emplace(key);
  return *it;
}

double ConfigNode::number(std::string_view key) {
  const Json& v = lookup(key);
  if (!v.is_number()) throw Error(ErrorKind::Config, "expected a number", key_path(key));
  return v.get<double>();
}

double ConfigNode::number_or(std::string_view key, double fallback) {
  return has(key) ? number(key) : fallback;
}

std::int64_t ConfigNode::integer(std::string_view key) {
  const Json& v = lookup(key);
  if (!v.is_number_integer()) throw Error(ErrorKind::Config, "expected an integer", key_path(key));
  return v.get<std::int64_t>();
}

std::int64_t ConfigNode::integer_or(std::string_view key, std::int64_t fallback) {
  return has(key) ? integer(key) : fallback;
}

bool ConfigNode::boolean_or(std::string_view key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& v = lookup(key);
  if (!v.is_boolean()) throw Error(ErrorKind::Config, "expected true or false", key_path(key));
  return v.get<bool>();
}

std::string ConfigNode::string(std::string_view key) {
  const Json& v = lookup(key);
  if (!v.is_string()) throw Error(ErrorKind::Config, "expected a string", key_path(key));
  return v.get<std::string>();
}

std::string ConfigNode::string_or(std::string_view key, std::string fallback) {
  return has(key) ? string(key) : fallback;
}

std::vector<double> ConfigNode::numbers(std::string_view key) {
  const Json& v = lookup(key);
  if (!v.is_array()) throw Error(ErrorKind::Config, "expected an array of numbers", key_path(key));
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw Error(ErrorKind::Config, "expected a number",
                  key_path(key) + "[" + std::to_string(i) + "]");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<double> ConfigNode::numbers_or(std::string_view key, std::vector<double> fallback) {
  return has(key) ? numbers(key) : std::move(fallback);
}

ConfigNode ConfigNode::child(std::string_view key) { return ConfigNode(lookup(key), key_path(key)); }

std::optional<ConfigNode> ConfigNode::optional_child(std::string_view key) {
  if (!has(key)) return std::nullopt;
  return child(key);
}

const Json& ConfigNode::raw(std::string_view key) { return lookup(key); }

std::vector<Json> ConfigNode::array(std::string_view key) {
  const Json& v = lookup(key);
  if (!v.is_array()) throw Error(ErrorKind::Config, "expected an array", key_path(key));
  return {v.begin(), v.end()};
}

void ConfigNode::finish() const {
  for (auto it = json_->begin(); it != json_->end(); ++it)
    if (!used_.contains(it.key()))
      throw Error(ErrorKind::Config, "unknown key", key_path(it.key()));
}

}  // namespace plslab
