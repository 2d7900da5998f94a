#pragma once

#include <boost/property_tree/ptree.hpp>
#include <optional>
#include <set>
#include <string>

#include "thermoarena/errors.hpp"

namespace thermoarena::config {

using Tree = boost::property_tree::ptree;

/// INI text: `key = value`, `[section]` headers, `#` or `;` comments.
Tree parse_ini(const std::string& text, const std::string& source = "<config>");
Tree read_ini_file(const std::string& path);
std::string write_ini(const Tree& tree);

template <typename T>
T get(const Tree& tree, const std::string& path) {
  const auto node = tree.get_optional<std::string>(path);
  if (!node) throw ConfigError(path, "missing required key");
  try {
    return tree.get<T>(path);
  } catch (const boost::property_tree::ptree_error&) {
    throw ConfigError(path, "cannot interpret '" + *node + "'");
  }
}

template <typename T>
T get_or(const Tree& tree, const std::string& path, T fallback) {
  const auto node = tree.get_optional<std::string>(path);
  if (!node || node->empty()) return fallback;
  return get<T>(tree, path);
}

/// Stores `value` in its shortest round-trip decimal form.
void put_number(Tree& tree, const std::string& path, double value);

template <>
bool get<bool>(const Tree& tree, const std::string& path);

/// Throws ConfigError naming the first key of `section` (or the top level when
/// empty) that is not in `allowed`.
void reject_unknown(const Tree& tree, const std::string& section, const std::set<std::string>& allowed);

}  // namespace thermoarena::config
