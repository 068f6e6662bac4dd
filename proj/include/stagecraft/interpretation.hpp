#pragma once

#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stagecraft/config.hpp"
#include "stagecraft/knowledge_base.hpp"
#include "stagecraft/rng.hpp"
#include "stagecraft/valence.hpp"

namespace stagecraft {

enum class ConstrualKind { literal, metaphoric, ironic };

std::string_view to_string(ConstrualKind k);
std::optional<ConstrualKind> construal_kind_from_string(std::string_view s);

/// How one role reads one plot action.
struct Construal {
  ConstrualKind kind = ConstrualKind::literal;
  std::string source_action_id;
  std::string enacted_action_id;
  std::string spoken_action_id;  // always the source: dialogue never switches
  std::optional<MetaphorLink> link;  // the link that fired, metaphoric only

  friend bool operator==(const Construal&, const Construal&) = default;
};

class InterpretationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Links of `entry` whose sign relation and threshold hold for this context.
std::vector<MetaphorLink> armed_links(const ActionEntry& entry, double prev_context,
                                      double valence);

bool link_armed(const MetaphorLink& link, double prev_context, double valence);

/// Picks literal, metaphoric or ironic. Irony needs cfg.irony_enabled, a jump
/// of at least irony_threshold across a sign change, and a declared
/// expectation present in the KB; a dangling expectation falls back.
Construal construe(const ActionEntry& entry, Role role, double prev_context, double valence,
                   const ActionKB& kb, const EngineConfig& cfg);

/// Throws InterpretationError when the expectation is absent from the KB.
Construal ironic_enactment(const ActionEntry& entry, Role role,
                           std::string_view expectation_action_id, const ActionKB& kb);

/// Index drawn with probability proportional to weights[i]. Always consumes
/// exactly one draw.
std::size_t weighted_index(std::span<const int> weights, SeededStream& rng);

/// Weighted draw (high 3, medium 2, low 1) over the enacted action's gestures
/// that fit the platform. At arousal >= 2 the draw is limited to sweeping
/// candidates when any exist. Throws InterpretationError when nothing fits.
const GestureSpec& select_enactment(const Construal& construal, Role role, const ActionKB& kb,
                                    const GestureDB& db, int arousal, SeededStream& rng,
                                    const std::set<Hardware>& platform);

/// Candidates select_enactment draws from, before the arousal filter.
std::vector<ResolvedEnactment> platform_enactments(const ActionKB& kb, const GestureDB& db,
                                                   std::string_view action_id, Role role,
                                                   const std::set<Hardware>& platform);

/// The per-role record of one step.
struct RoleTrace {
  std::string character_id;
  Role role = Role::agent;
  double prev_context = 0.0;
  double valence = 0.0;
  double context = 0.0;
  Delta delta;
  int arousal = 0;
  std::vector<MetaphorLink> armed;
  Construal construal;
  std::string gesture_id;
  std::string dialogue;
};

/// Reference, context and presentation of one plot action.
struct StepTrace {
  std::size_t index = 0;
  std::string action_id;
  Connective connective = Connective::then;
  std::optional<Connective> connective_in;
  RoleTrace agent;
  RoleTrace patient;
};

struct InterpretationTrace {
  std::uint64_t seed = 0;
  std::vector<StepTrace> steps;
};

}  // namespace stagecraft
