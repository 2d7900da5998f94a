#include "thermoarena/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <charconv>
#include <fstream>
#include <sstream>

namespace thermoarena::config {

namespace pt = boost::property_tree;

Tree parse_ini(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  Tree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source, e.message() + " at line " + std::to_string(e.line()));
  }
  return tree;
}

Tree read_ini_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ini(ss.str(), path);
}

std::string write_ini(const Tree& tree) {
  std::ostringstream out;
  pt::write_ini(out, tree);
  return out.str();
}

void put_number(Tree& tree, const std::string& path, double value) {
  if (value == 0.0) value = 0.0;  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  tree.put(path, std::string(buf, res.ptr));
}

template <>
bool get<bool>(const Tree& tree, const std::string& path) {
  const auto v = get<std::string>(tree, path);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(path, "expected a boolean, got '" + v + "'");
}

void reject_unknown(const Tree& tree, const std::string& section, const std::set<std::string>& allowed) {
  const Tree* node = &tree;
  if (!section.empty()) {
    const auto child = tree.get_child_optional(section);
    if (!child) return;
    node = &*child;
  }
  for (const auto& [key, value] : *node) {
    if (!allowed.contains(key)) throw ConfigError(section.empty() ? key : section + "." + key, "unknown key");
  }
}

}  // namespace thermoarena::config
