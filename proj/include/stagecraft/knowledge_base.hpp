#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stagecraft/config.hpp"
#include "stagecraft/diagnostics.hpp"

namespace stagecraft {

enum class Role { agent, patient };  // the A and B roles of a plot action

std::string_view to_string(Role r);

inline constexpr int kScaleMin = -3;
inline constexpr int kScaleMax = 3;
inline constexpr int kArousalMax = 3;

/// Values on the four emotional scales for one role of one action.
struct EmotionVector {
  int inspiration = 0;  // disappointed <-> inspired
  int attraction = 0;   // repelled <-> attracted
  int support = 0;      // attacked <-> supported
  int respect = 0;      // disrespected <-> respected

  int sum() const { return inspiration + attraction + support + respect; }

  friend bool operator==(const EmotionVector&, const EmotionVector&) = default;
};

enum class Engagement { engage, disengage, neutral };

enum class AppropriatenessLevel { high, medium, low };

struct Appropriateness {
  AppropriatenessLevel level = AppropriatenessLevel::high;

  int weight() const {
    switch (level) {
      case AppropriatenessLevel::high: return 3;
      case AppropriatenessLevel::medium: return 2;
      case AppropriatenessLevel::low: return 1;
    }
    return 0;
  }

  friend bool operator==(const Appropriateness&, const Appropriateness&) = default;
};

enum class LinkMode { shock, reinforce };

struct MetaphorLink {
  std::string target_action_id;
  LinkMode mode = LinkMode::shock;
  double threshold = 1.0;  // |context| needed to arm the link

  friend bool operator==(const MetaphorLink&, const MetaphorLink&) = default;
};

struct Enactment {
  std::string gesture_id;
  Appropriateness appropriateness;

  friend bool operator==(const Enactment&, const Enactment&) = default;
};

struct ActionEntry {
  std::string action_id;
  EmotionVector scales_A;
  EmotionVector scales_B;
  int arousal_A = 0;
  int arousal_B = 0;
  Engagement engagement = Engagement::neutral;
  std::string dialogue_agent;
  std::string dialogue_patient;
  std::vector<Enactment> enactments_agent;
  std::vector<Enactment> enactments_patient;
  std::vector<MetaphorLink> metaphor_links;
  // Action a performer may ironically enact in place of this one.
  std::optional<std::string> irony_expectation;

  const EmotionVector& scales(Role r) const { return r == Role::agent ? scales_A : scales_B; }
  int arousal(Role r) const { return r == Role::agent ? arousal_A : arousal_B; }
  const std::string& dialogue(Role r) const {
    return r == Role::agent ? dialogue_agent : dialogue_patient;
  }
  const std::vector<Enactment>& enactments(Role r) const {
    return r == Role::agent ? enactments_agent : enactments_patient;
  }

  friend bool operator==(const ActionEntry&, const ActionEntry&) = default;
};

enum class GestureKind { iconic, deictic, metaphoric, cohesive, beat };
enum class SchemaLabel { up, down, near, far, front, back };
enum class GestureFlag { sweeping, walk_safe, subtle };

struct GestureSpec {
  std::string gesture_id;
  std::string short_desc;
  std::string long_desc;
  double duration_s = 1.0;
  std::set<GestureKind> kind_capabilities;
  std::set<SchemaLabel> schema_labels;
  std::set<Hardware> hardware;
  std::set<GestureFlag> flags;
  // Quieter stand-in used when actors are too close for a sweeping motion.
  std::optional<std::string> subtle_variant;

  bool can(GestureKind k) const { return kind_capabilities.count(k) != 0; }
  bool has(GestureFlag f) const { return flags.count(f) != 0; }
  bool fits(const std::set<Hardware>& platform) const;

  friend bool operator==(const GestureSpec&, const GestureSpec&) = default;
};

class KbError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GestureDB {
 public:
  GestureDB() = default;
  explicit GestureDB(std::vector<GestureSpec> gestures);  // throws KbError

  const GestureSpec* find(std::string_view id) const;
  const GestureSpec& at(std::string_view id) const;  // throws KbError
  const std::vector<GestureSpec>& gestures() const { return gestures_; }
  std::size_t size() const { return gestures_.size(); }

  friend bool operator==(const GestureDB& a, const GestureDB& b) {
    return a.gestures_ == b.gestures_;
  }

 private:
  std::vector<GestureSpec> gestures_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Immutable after construction; every invariant is checked on the way in.
class ActionKB {
 public:
  ActionKB() = default;
  ActionKB(std::vector<ActionEntry> actions, std::vector<std::string> cohesive_pool,
           std::vector<std::string> beat_pool);  // throws KbError

  const ActionEntry* find(std::string_view id) const;
  const ActionEntry& at(std::string_view id) const;  // throws KbError
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  const std::vector<ActionEntry>& actions() const { return actions_; }
  const std::vector<std::string>& cohesive_pool() const { return cohesive_pool_; }
  const std::vector<std::string>& beat_pool() const { return beat_pool_; }
  std::size_t size() const { return actions_.size(); }

  /// Non-fatal remarks collected while loading (e.g. dangling irony expectations).
  const std::vector<std::string>& load_warnings() const { return warnings_; }

  friend bool operator==(const ActionKB& a, const ActionKB& b) {
    return a.actions_ == b.actions_ && a.cohesive_pool_ == b.cohesive_pool_ &&
           a.beat_pool_ == b.beat_pool_;
  }

 private:
  std::vector<ActionEntry> actions_;
  std::vector<std::string> cohesive_pool_;
  std::vector<std::string> beat_pool_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::string> warnings_;
};

ActionKB load_action_kb(std::string_view source);
ActionKB action_kb_from_json(const nlohmann::json& j);
nlohmann::json action_kb_to_json(const ActionKB& kb);

GestureDB load_gesture_db(std::string_view source);
GestureDB gesture_db_from_json(const nlohmann::json& j);
nlohmann::json gesture_db_to_json(const GestureDB& db);

using ResolvedEnactment = std::pair<const GestureSpec*, Appropriateness>;

/// Gestures for one role of an action, in KB order. Throws KbError for an
/// unknown action or a gesture id missing from the DB.
std::vector<ResolvedEnactment> enactments_for(const ActionKB& kb, const GestureDB& db,
                                              std::string_view action_id, Role role);

/// First metaphor link of the action with the given mode.
std::optional<MetaphorLink> metaphor_target_for(const ActionKB& kb, std::string_view action_id,
                                                LinkMode mode);

/// Cross-checks a KB against a gesture DB and platform: gesture ids resolve,
/// every role has a platform-compatible enactment, pools hold gestures of the
/// right kind, subtle variants exist.
std::vector<Diagnostic> check_kb_closure(const ActionKB& kb, const GestureDB& db,
                                         const std::set<Hardware>& platform);

std::string_view to_string(Engagement e);
std::string_view to_string(AppropriatenessLevel a);
std::string_view to_string(LinkMode m);
std::string_view to_string(GestureKind k);
std::string_view to_string(SchemaLabel s);
std::string_view to_string(GestureFlag f);

}  // namespace stagecraft
