#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <yaml-cpp/yaml.h>

#include "common/error.hpp"

namespace digirr::yaml {

// A document plus the name used in diagnostics ("file.yaml:12:3: ...").
struct Doc {
  std::string source;
  YAML::Node root;
};

// Throws Error(config) with a line-numbered message on read/parse failure.
Doc load_file(const std::filesystem::path& path);
Doc load_string(const std::string& text, std::string source = "<string>");

// "source:line:col: what" for a node (line/col 1-based).
std::string where(const std::string& source, const YAML::Node& node);
[[noreturn]] void fail_at(const std::string& source, const YAML::Node& node, const std::string& what);

// Typed scalar read with a line-numbered error on conversion failure.
template <class T>
T as(const std::string& source, const YAML::Node& node, const char* field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail_at(source, node, std::string("field '") + field + "' has the wrong type");
  }
}

template <class T>
std::optional<T> opt(const std::string& source, const YAML::Node& map, const char* field) {
  const YAML::Node n = map[field];
  if (!n || n.IsNull()) return std::nullopt;
  return as<T>(source, n, field);
}

template <class T>
T req(const std::string& source, const YAML::Node& map, const char* field) {
  const YAML::Node n = map[field];
  if (!n || n.IsNull()) fail_at(source, map, std::string("missing required field '") + field + "'");
  return as<T>(source, n, field);
}

// Rejects keys outside `allowed` (typos would otherwise be silently ignored).
void check_keys(const std::string& source, const YAML::Node& map, std::initializer_list<const char*> allowed);

}  // namespace digirr::yaml
