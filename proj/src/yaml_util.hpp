#pragma once

// YAML reading helpers shared by the catalog and scenario parsers.

#include <algorithm>
#include <charconv>
#include <initializer_list>
#include <string>
#include <string_view>

#include <yaml-cpp/yaml.h>

#include "cbc/errors.hpp"

namespace cbc::detail {

[[noreturn]] inline void fail_at(const YAML::Node& node, const std::string& message) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) throw ParseError(message);
  throw ParseError(message, mark.line + 1, mark.column + 1);
}

inline void expect_map(const YAML::Node& node, std::string_view what) {
  if (!node.IsMap()) fail_at(node, std::string(what) + " must be a mapping");
}

inline void expect_seq(const YAML::Node& node, std::string_view what) {
  if (!node.IsSequence()) fail_at(node, std::string(what) + " must be a sequence");
}

inline void check_keys(const YAML::Node& node, std::initializer_list<std::string_view> allowed, std::string_view what) {
  for (const auto& item : node) {
    const std::string key = item.first.Scalar();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail_at(item.first, "unknown field '" + key + "' in " + std::string(what));
    }
  }
}

inline YAML::Node require_field(const YAML::Node& node, const char* key, std::string_view what) {
  const YAML::Node field = node[key];
  if (!field) fail_at(node, std::string(what) + " is missing required field '" + key + "'");
  return field;
}

inline std::string read_scalar(const YAML::Node& node, std::string_view what) {
  if (!node.IsScalar()) fail_at(node, std::string(what) + " must be a scalar");
  return node.Scalar();
}

inline double read_number(const YAML::Node& node, std::string_view what) {
  if (!node.IsScalar()) fail_at(node, std::string(what) + " must be a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail_at(node, std::string(what) + " must be a number, got '" + node.Scalar() + "'");
  }
}

inline bool read_bool(const YAML::Node& node, std::string_view what) {
  if (!node.IsScalar()) fail_at(node, std::string(what) + " must be a boolean");
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    fail_at(node, std::string(what) + " must be a boolean, got '" + node.Scalar() + "'");
  }
}

inline YAML::Node load_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
}

inline std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

}  // namespace cbc::detail
