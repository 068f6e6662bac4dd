#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "stagecraft/config.hpp"
#include "stagecraft/knowledge_base.hpp"
#include "stagecraft/script.hpp"

namespace stagecraft {

/// Sum of the four scale values of one role: an integer in [-12, 12].
double role_valence(const ActionEntry& entry, Role role);

struct ValenceStep {
  std::size_t action_index = 0;
  double valence = 0.0;
  double context = 0.0;
  double delta = 0.0;  // context minus the previous context
};

/// Running, exponentially decaying context of one character.
struct ValenceState {
  std::string character_id;
  double context = 0.0;
  std::vector<ValenceStep> history;
};

class ValenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// context <- beta * valence + (1 - beta) * context, appending to the history.
/// Throws ValenceError unless 0 < beta < 1.
ValenceState update_context(ValenceState state, double valence, double beta);

enum class Direction { toward, away, none };

std::string_view to_string(Direction d);

struct Delta {
  double value = 0.0;
  bool significant = false;
  Direction direction = Direction::none;
};

/// Significance is inclusive: |value| >= tau.
Delta classify_delta(double value, double tau);

/// Delta of the latest update. An empty history yields a zero delta.
Delta delta(const ValenceState& state, double tau);

/// "but" on a sign change with a large jump, "so" on a moderate jump, else
/// "then". A zero sign matches either sign.
Connective classify_connective(double prev_context, double valence, double delta,
                               const EngineConfig& cfg);

int arousal_level(const ActionEntry& entry, Role role);

/// Per-character view of one step of a script run.
struct CharacterStep {
  std::string character_id;
  Role role = Role::agent;
  double prev_context = 0.0;
  double valence = 0.0;
  double context = 0.0;
  Delta delta;
  Connective connective = Connective::then;
};

struct StepValence {
  std::size_t index = 0;
  std::string action_id;
  CharacterStep agent;
  CharacterStep patient;
  Connective connective = Connective::then;  // strongest of the two character connectives

  const CharacterStep& of(std::string_view character_id) const {
    return agent.character_id == character_id ? agent : patient;
  }
};

struct ValenceRun {
  std::vector<StepValence> steps;
  std::vector<ValenceState> states;  // one per declared character, declaration order
};

/// Runs the recurrence over a whole script, both characters from a zero
/// context. Unknown actions throw KbError.
ValenceRun run_valence(const Script& script, const ActionKB& kb, const EngineConfig& cfg);

/// Strength order but > so > then.
Connective stronger(Connective a, Connective b);

}  // namespace stagecraft
