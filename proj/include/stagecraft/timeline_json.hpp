#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "stagecraft/choreographer.hpp"
#include "stagecraft/interpretation.hpp"

namespace stagecraft {

inline constexpr const char* kTimelineFormat = "stagecraft.timeline";
inline constexpr const char* kTraceFormat = "stagecraft.interpretation";

nlohmann::json timeline_to_json(const Timeline& timeline);

/// Throws std::runtime_error on a missing field, an unknown enum value or an
/// unsupported version.
Timeline timeline_from_json(const nlohmann::json& j);

nlohmann::json trace_to_json(const InterpretationTrace& trace);

nlohmann::json diff_to_json(const std::vector<EventDiff>& diff);

nlohmann::json stage_to_json(const StageState& stage);

/// Pretty-printed with a trailing newline, so identical timelines give
/// identical bytes.
std::string dump_document(const nlohmann::json& j);

/// Built-in combination matrix in its data-file form.
nlohmann::json combination_matrix_to_json();

/// Compares a matrix document against the built-in table. One message per
/// disagreeing or malformed entry.
std::vector<std::string> check_combination_matrix(const nlohmann::json& j);

}  // namespace stagecraft
