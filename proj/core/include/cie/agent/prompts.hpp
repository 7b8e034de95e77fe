#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

namespace cie {

/// Built-in prompt text by id: "agent_system", "planner", "reasoner",
/// "executor", "finalize". Throws ConfigError for unknown ids.
std::string_view prompt_text(std::string_view id);

/// The versioned tool schema document ({"schema_version", "notes", "tools"}).
const nlohmann::json& tool_schema();

/// The OpenAI-style "tools" array from the schema.
const nlohmann::json& tool_definitions();

}  // namespace cie
