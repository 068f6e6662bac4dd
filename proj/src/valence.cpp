#include "stagecraft/valence.hpp"

#include <cmath>

namespace stagecraft {

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

int strength(Connective c) {
  switch (c) {
    case Connective::but: return 2;
    case Connective::so: return 1;
    case Connective::then: return 0;
  }
  return 0;
}

}  // namespace

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::toward: return "toward";
    case Direction::away: return "away";
    case Direction::none: return "none";
  }
  return "?";
}

double role_valence(const ActionEntry& entry, Role role) {
  return static_cast<double>(entry.scales(role).sum());
}

ValenceState update_context(ValenceState state, double valence, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw ValenceError("decay weight must satisfy 0 < beta < 1, got " + std::to_string(beta));
  const double previous = state.context;
  state.context = beta * valence + (1.0 - beta) * previous;
  state.history.push_back(
      {state.history.size(), valence, state.context, state.context - previous});
  return state;
}

Delta classify_delta(double value, double tau) {
  Delta d;
  d.value = value;
  d.significant = std::abs(value) >= tau;
  if (d.significant) d.direction = value > 0.0 ? Direction::toward : Direction::away;
  return d;
}

Delta delta(const ValenceState& state, double tau) {
  if (state.history.empty()) return classify_delta(0.0, tau);
  return classify_delta(state.history.back().delta, tau);
}

Connective classify_connective(double prev_context, double valence, double delta,
                               const EngineConfig& cfg) {
  const int sv = sign(valence);
  const int sc = sign(prev_context);
  const bool flipped = sv != 0 && sc != 0 && sv != sc;
  const double jump = std::abs(delta);
  if (flipped && jump >= cfg.connective_but) return Connective::but;
  if (jump >= cfg.connective_so) return Connective::so;
  return Connective::then;
}

int arousal_level(const ActionEntry& entry, Role role) { return entry.arousal(role); }

Connective stronger(Connective a, Connective b) { return strength(a) >= strength(b) ? a : b; }

ValenceRun run_valence(const Script& script, const ActionKB& kb, const EngineConfig& cfg) {
  ValenceRun run;
  for (const auto& c : script.characters) run.states.push_back({c.id, 0.0, {}});
  auto state_of = [&](const std::string& id) -> ValenceState& {
    for (auto& s : run.states) {
      if (s.character_id == id) return s;
    }
    throw KbError("character '" + id + "' is not declared");
  };

  for (const auto& action : script.actions) {
    const ActionEntry& entry = kb.at(action.action_id);
    StepValence step;
    step.index = action.index;
    step.action_id = action.action_id;
    auto advance = [&](const std::string& id, Role role) {
      ValenceState& st = state_of(id);
      CharacterStep cs;
      cs.character_id = id;
      cs.role = role;
      cs.prev_context = st.context;
      cs.valence = role_valence(entry, role);
      st = update_context(std::move(st), cs.valence, cfg.decay_weight);
      st.history.back().action_index = action.index;
      cs.context = st.context;
      cs.delta = delta(st, cfg.step_threshold);
      cs.connective = classify_connective(cs.prev_context, cs.valence, cs.delta.value, cfg);
      return cs;
    };
    step.agent = advance(action.agent, Role::agent);
    step.patient = advance(action.patient, Role::patient);
    step.connective = stronger(step.agent.connective, step.patient.connective);
    run.steps.push_back(std::move(step));
  }
  return run;
}

}  // namespace stagecraft
