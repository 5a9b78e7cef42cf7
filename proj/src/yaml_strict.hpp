#pragma once

#include <string>
#include <string_view>

#include <yaml-cpp/yaml.h>

namespace modelcard::detail {

/// Parses one YAML document. Anchors and aliases are rejected; syntax errors
/// surface as YamlSyntaxError carrying a 1-based line and column.
YAML::Node load_yaml_strict(std::string_view text, std::string_view source);

/// "line L, column C" for a node mark (1-based).
std::string describe_mark(const YAML::Mark& mark);

} // namespace modelcard::detail
