#pragma once

#include <optional>
#include <string_view>

namespace cie::assets {

/// Text assets compiled into the library from core/assets, keyed by their
/// path relative to that directory ("tool_schema.json", "prompts/planner.txt").
std::optional<std::string_view> find(std::string_view name);

}  // namespace cie::assets
