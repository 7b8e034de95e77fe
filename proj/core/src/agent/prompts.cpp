#include "cie/agent/prompts.hpp"

#include <string>

#include "cie/assets.hpp"
#include "cie/error.hpp"

namespace cie {

std::string_view prompt_text(std::string_view id) {
  const auto text = assets::find("prompts/" + std::string(id) + ".txt");
  if (!text) throw ConfigError("unknown prompt id '" + std::string(id) + "'");
  return *text;
}

const nlohmann::json& tool_schema() {
  static const nlohmann::json schema = [] {
    const auto text = assets::find("tool_schema.json");
    if (!text) throw ConfigError("tool schema asset missing");
    return nlohmann::json::parse(*text);
  }();
  return schema;
}

const nlohmann::json& tool_definitions() { return tool_schema().at("tools"); }

}  // namespace cie
