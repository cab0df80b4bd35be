#pragma once

// Internal helpers for reading JSON documents with path-qualified errors.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "grieferlens/error.hpp"
#include "json.hpp"

namespace grieferlens::jsonutil {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::string join(std::string_view base, std::string_view key) {
  if (base.empty()) return std::string(key);
  return std::string(base) + "." + std::string(key);
}

inline std::string index(std::string_view base, std::size_t i) {
  return std::string(base) + "[" + std::to_string(i) + "]";
}

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::schema_violation, path + ": " + what, path);
}

template <typename J>
const J& require(const J& obj, std::string_view key, const std::string& base) {
  if (!obj.is_object()) schema_error(base, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(join(base, key), "missing field");
  return *it;
}

template <typename J>
double get_number(const J& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected number");
  double d = v.template get<double>();
  if (!std::isfinite(d)) schema_error(path, "expected finite number");
  return d;
}

template <typename J>
double number_field(const J& obj, std::string_view key, const std::string& base) {
  return get_number(require(obj, key, base), join(base, key));
}

template <typename J>
std::string string_field(const J& obj, std::string_view key, const std::string& base) {
  const J& v = require(obj, key, base);
  if (!v.is_string()) schema_error(join(base, key), "expected string");
  return v.template get<std::string>();
}

template <typename J>
long long integer_field(const J& obj, std::string_view key, const std::string& base) {
  const J& v = require(obj, key, base);
  if (!v.is_number_integer()) schema_error(join(base, key), "expected integer");
  return v.template get<long long>();
}

template <typename J>
const J& array_field(const J& obj, std::string_view key, const std::string& base) {
  const J& v = require(obj, key, base);
  if (!v.is_array()) schema_error(join(base, key), "expected array");
  return v;
}

template <typename J, typename Table>
auto enum_field(const J& obj, std::string_view key, const std::string& base, const Table& table) {
  std::string s = string_field(obj, key, base);
  for (const auto& [e, name] : table) {
    if (name == s) return e;
  }
  schema_error(join(base, key), "unknown value '" + s + "'");
}

/// Rounds to a fixed number of decimals so serialized floats are stable.
inline double round_to(double v, int decimals) {
  double scale = std::pow(10.0, decimals);
  double r = std::round(v * scale) / scale;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

inline json parse_or_throw(std::string_view raw) {
  try {
    return json::parse(raw.begin(), raw.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::malformed_input, std::string("malformed JSON: ") + e.what(), "");
  }
}

}  // namespace grieferlens::jsonutil
