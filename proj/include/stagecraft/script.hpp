#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stagecraft/diagnostics.hpp"

namespace stagecraft {

class ActionKB;
struct EngineConfig;

enum class Connective { but, then, so };

std::string_view to_string(Connective c);
std::optional<Connective> connective_from_string(std::string_view s);

struct Character {
  std::string id;
  std::string display_name;
  SourcePos pos;
};

struct PlotAction {
  std::size_t index = 0;
  std::string action_id;
  std::string agent;    // character id in role A
  std::string patient;  // character id in role B
  std::optional<Connective> connective_in;
  SourcePos pos;
};

/// A two-character plot: one header line declaring the characters, then one
/// action per line.
struct Script {
  std::vector<Character> characters;
  std::vector<PlotAction> actions;

  const Character* find_character(std::string_view id) const;
};

/// Equality over content only; source positions are ignored.
bool structurally_equal(const Script& a, const Script& b);

class ScriptError : public std::runtime_error {
 public:
  ScriptError(SourcePos pos, std::string message, std::vector<std::string> expected = {});

  const SourcePos& pos() const noexcept { return pos_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  SourcePos pos_;
  std::string detail_;
  std::vector<std::string> expected_;
};

/// Parses the line-oriented script DSL. Throws ScriptError on the first
/// problem, positioned at the offending token.
Script parse_script(std::string_view source);

/// Canonical text form; parse_script(serialize_script(s)) is structurally
/// equal to s.
std::string serialize_script(const Script& script);

bool is_valid_action_name(std::string_view name);

/// Checks the script against the knowledge base. Unknown actions and bad role
/// bindings are errors; written connectives that disagree with the
/// valence-derived connective are warnings.
std::vector<Diagnostic> validate_script(const Script& script, const ActionKB& kb,
                                        const EngineConfig& cfg);
std::vector<Diagnostic> validate_script(const Script& script, const ActionKB& kb);

}  // namespace stagecraft
