#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stagecraft/config.hpp"
#include "stagecraft/interpretation.hpp"
#include "stagecraft/knowledge_base.hpp"
#include "stagecraft/movement.hpp"
#include "stagecraft/script.hpp"
#include "stagecraft/valence.hpp"

namespace stagecraft {

enum class Justification { mapping, delta_step, engagement_turn, cohesive, beat, incoherent_baseline };

std::string_view to_string(Justification j);
std::optional<Justification> justification_from_string(std::string_view s);

/// Experimental condition a timeline is built for.
enum class Mode { coherent, incoherent_spatial, incoherent_gesture };

std::string_view to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);

inline constexpr double kReachMargin = 0.3;       // meters added to min_distance
inline constexpr double kStepDuration = 1.0;      // seconds per spatial step
inline constexpr double kMinTurnDuration = 0.4;   // seconds
inline constexpr double kHalfTurnDuration = 1.6;  // seconds for a turn of pi

double turn_duration(double theta);

struct MovementEvent {
  MovementKind kind = MovementKind::iconic;
  std::optional<std::string> gesture_id;  // gesture kinds
  std::optional<Transform> transform;     // body kinds
  double onset_s = 0.0;                   // from slot start
  double duration_s = 1.0;
  Justification justification = Justification::mapping;
  std::vector<Condition> conditions;  // asserted for restricted overlaps

  double end_s() const { return onset_s + duration_s; }
  std::string label() const;

  friend bool operator==(const MovementEvent&, const MovementEvent&) = default;
};

/// Half-open intervals; events that only touch do not overlap.
bool overlaps(const MovementEvent& a, const MovementEvent& b);

struct Track {
  std::string actor_id;
  std::vector<MovementEvent> events;

  double end_s() const;

  friend bool operator==(const Track&, const Track&) = default;
};

struct Slot {
  std::size_t index = 0;
  std::string action_id;
  std::string agent;
  std::string patient;
  Connective connective = Connective::then;  // derived from valence
  std::optional<Connective> connective_in;   // as written
  std::string narration;
  Construal agent_construal;
  Construal patient_construal;
  std::vector<Track> tracks;  // one per actor, declaration order

  double duration_s() const;
  const Track& track(std::string_view actor_id) const;
  Track& track(std::string_view actor_id);

  friend bool operator==(const Slot&, const Slot&) = default;
};

struct ActorPose {
  std::string actor_id;
  Pose pose;

  friend bool operator==(const ActorPose&, const ActorPose&) = default;
};

struct StageState {
  std::vector<ActorPose> poses;

  const Pose& pose(std::string_view actor_id) const;
  Pose& pose(std::string_view actor_id);
  /// Distance between the two focal actors.
  double distance() const;

  friend bool operator==(const StageState&, const StageState&) = default;
};

inline constexpr int kTimelineVersion = 1;

struct Timeline {
  int version = kTimelineVersion;
  Mode mode = Mode::coherent;
  EngineConfig config;
  std::vector<Character> actors;
  StageState initial_stage;
  std::vector<Slot> slots;
  StageState final_stage;  // planner prediction
  std::vector<std::string> warnings;
};

class LegalityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

StageBounds stage_bounds(const EngineConfig& cfg);

/// First declared character on the left facing right, second on the right
/// facing left, initial_separation apart.
StageState initial_stage(const Script& script, const EngineConfig& cfg);

/// Translation along the actor's heading that moves it one step toward
/// (positive radial) or away from its partner. Toward-steps that would end
/// inside min_distance are suppressed, away-steps are shortened at the stage
/// edge, and a step of zero length is suppressed.
std::optional<Transform> spatial_decision(const Delta& delta, const StageState& stage,
                                          std::string_view actor_id, const EngineConfig& cfg,
                                          std::vector<std::string>* warnings = nullptr);

/// Turn to face the partner (engage) or face directly away (disengage), by the
/// minimal signed angle. Zero turns are suppressed.
std::optional<Transform> rotation_decision(const ActionEntry& entry, Role role,
                                           const StageState& stage, std::string_view actor_id);

/// True when the actor's heading points at its partner.
bool faces_partner(const StageState& stage, std::string_view actor_id);

/// Sweeping gestures inside min_distance + reach margin give way to their
/// subtle variant, else to the best-weighted non-sweeping candidate, else stay
/// (with a warning).
const GestureSpec& proximity_guard(const GestureSpec& gesture,
                                   std::span<const ResolvedEnactment> candidates,
                                   const GestureDB& db, double distance, const EngineConfig& cfg,
                                   std::vector<std::string>* warnings = nullptr);

struct CohesiveCue {
  std::string motif;  // character referenced without acting
  std::string gesture_id;

  friend bool operator==(const CohesiveCue&, const CohesiveCue&) = default;
};

/// One optional cue per slot. A motif is a character appearing as patient;
/// motifs that occur at least twice get a cohesive gesture at every
/// occurrence, bound once from the pool in order of first appearance.
/// Throws KbError when a cue is needed and the pool is empty.
std::vector<std::optional<CohesiveCue>> schedule_cohesives(const Script& script,
                                                           const ActionKB& kb);

/// Removes beats that overlap a cohesive event anywhere in the slot. Returns
/// how many were removed.
std::size_t drop_conflicting_beats(Slot& slot);

/// Event kind for a mapped gesture under a construal.
MovementKind mapped_kind(ConstrualKind construal, const GestureSpec& gesture);

/// Compiles a script into a timeline. Spatial steps are planned against the
/// coherent stage and its mirror (every step reversed) together so both
/// conditions share step lengths, suppressions and gesture substitutions.
/// Throws LegalityError if the result breaks the combination rules.
Timeline plan_performance(const Script& script, const ActionKB& kb, const GestureDB& db,
                          const EngineConfig& cfg, Mode mode,
                          InterpretationTrace* trace = nullptr);

/// Every overlapping pair in every track, checked against the matrix. A
/// restricted overlap is legal only when the body event names the right
/// condition and, for walk_safe, the gesture carries the flag.
std::vector<Diagnostic> check_timeline_legality(const Timeline& timeline, const GestureDB& db);

/// Applies every transform in track order to the initial stage.
StageState replay_stage(const Timeline& timeline);

struct EventDiff {
  std::size_t slot = 0;
  std::string actor;
  std::size_t event = 0;
  std::string field;
  std::string before;
  std::string after;
  // Set for transform diffs so callers can compare numerically.
  std::optional<double> before_value;
  std::optional<double> after_value;
};

/// Field-by-field structural difference over slots and events. Stage
/// predictions, warnings and the mode tag are not compared.
std::vector<EventDiff> diff_timelines(const Timeline& a, const Timeline& b);

}  // namespace stagecraft
