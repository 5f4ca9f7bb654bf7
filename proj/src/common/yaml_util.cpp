#include "common/yaml_util.hpp"

#include <fstream>
#include <sstream>

namespace digirr::yaml {

Doc load_string(const std::string& text, std::string source) {
  try {
    return {source, YAML::Load(text)};
  } catch (const YAML::ParserException& e) {
    fail(ErrorKind::config, source + ":" + std::to_string(e.mark.line + 1) + ":" +
                                std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
}

Doc load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, path.string() + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_string(ss.str(), path.string());
}

std::string where(const std::string& source, const YAML::Node& node) {
  const auto m = node.Mark();
  if (m.is_null()) return source;
  return source + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
}

void fail_at(const std::string& source, const YAML::Node& node, const std::string& what) {
  fail(ErrorKind::config, where(source, node) + ": " + what);
}

void check_keys(const std::string& source, const YAML::Node& map, std::initializer_list<const char*> allowed) {
  if (!map.IsMap()) fail_at(source, map, "expected a mapping");
  for (const auto& kv : map) {
    const auto k = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) fail_at(source, kv.first, "unknown key '" + k + "'");
  }
}

}  // namespace digirr::yaml
