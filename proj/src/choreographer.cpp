#include "stagecraft/choreographer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Core>

namespace stagecraft {

namespace {

constexpr double kAngleEps = 1e-9;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

const std::string& partner_of(const StageState& stage, std::string_view actor_id) {
  if (stage.poses.size() != 2) throw std::logic_error("stage must hold exactly two actors");
  return stage.poses[0].actor_id == actor_id ? stage.poses[1].actor_id : stage.poses[0].actor_id;
}

double bearing_to(const Pose& from, const Pose& to) {
  return normalize_heading(std::atan2(to.y - from.y, to.x - from.x));
}

// +1 when the heading points at the partner, -1 when directly away, 0 otherwise.
int facing_sign(const Pose& self, const Pose& other) {
  const double off = shortest_rotation(self.heading, bearing_to(self, other));
  if (std::abs(off) < kAngleEps) return 1;
  if (std::abs(std::abs(off) - kPi) < kAngleEps) return -1;
  return 0;
}

bool has_locomotion(const EngineConfig& cfg) {
  return cfg.platform.count(Hardware::locomotion) != 0;
}

// Largest radial step not exceeding |radial| that the stage allows, or 0 when
// the step must be suppressed. Radial is positive toward the partner.
double feasible_step(const StageState& stage, std::string_view actor_id, double radial,
                     const EngineConfig& cfg) {
  const Pose& self = stage.pose(actor_id);
  const Pose& other = stage.pose(partner_of(stage, actor_id));
  const int facing = facing_sign(self, other);
  if (facing == 0) return 0.0;
  if (radial > 0.0 && stage.distance() - radial < cfg.min_distance) return 0.0;
  const double omega = radial * facing;
  return std::abs(clamp_translation(self, omega, stage_bounds(cfg)));
}

double radial_omega(const StageState& stage, std::string_view actor_id, double radial) {
  const Pose& self = stage.pose(actor_id);
  const Pose& other = stage.pose(partner_of(stage, actor_id));
  return radial * facing_sign(self, other);
}

bool is_gesture_kind(MovementKind k) { return !is_body_movement(k); }

}  // namespace

std::string_view to_string(Justification j) {
  switch (j) {
    case Justification::mapping: return "mapping";
    case Justification::delta_step: return "delta_step";
    case Justification::engagement_turn: return "engagement_turn";
    case Justification::cohesive: return "cohesive";
    case Justification::beat: return "beat";
    case Justification::incoherent_baseline: return "incoherent_baseline";
  }
  return "?";
}

std::optional<Justification> justification_from_string(std::string_view s) {
  for (auto j : {Justification::mapping, Justification::delta_step, Justification::engagement_turn,
                 Justification::cohesive, Justification::beat,
                 Justification::incoherent_baseline}) {
    if (to_string(j) == s) return j;
  }
  return std::nullopt;
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::coherent: return "coherent";
    case Mode::incoherent_spatial: return "incoherent_spatial";
    case Mode::incoherent_gesture: return "incoherent_gesture";
  }
  return "?";
}

std::optional<Mode> mode_from_string(std::string_view s) {
  for (auto m : {Mode::coherent, Mode::incoherent_spatial, Mode::incoherent_gesture}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

double turn_duration(double theta) {
  return std::max(kMinTurnDuration, kHalfTurnDuration * std::abs(theta) / kPi);
}

std::string MovementEvent::label() const {
  if (gesture_id) return *gesture_id;
  if (transform) {
    if (const auto* t = std::get_if<Translation>(&*transform)) return "step(" + fmt(t->omega) + ")";
    return "turn(" + fmt(std::get<Rotation>(*transform).theta) + ")";
  }
  return std::string(to_string(kind));
}

bool overlaps(const MovementEvent& a, const MovementEvent& b) {
  return a.onset_s < b.end_s() && b.onset_s < a.end_s();
}

double Track::end_s() const {
  double end = 0.0;
  for (const auto& e : events) end = std::max(end, e.end_s());
  return end;
}

double Slot::duration_s() const {
  double end = 0.0;
  for (const auto& t : tracks) end = std::max(end, t.end_s());
  return end;
}

const Track& Slot::track(std::string_view actor_id) const {
  for (const auto& t : tracks) {
    if (t.actor_id == actor_id) return t;
  }
  throw std::out_of_range("no track for actor '" + std::string(actor_id) + "'");
}

Track& Slot::track(std::string_view actor_id) {
  return const_cast<Track&>(std::as_const(*this).track(actor_id));
}

const Pose& StageState::pose(std::string_view actor_id) const {
  for (const auto& p : poses) {
    if (p.actor_id == actor_id) return p.pose;
  }
  throw std::out_of_range("no pose for actor '" + std::string(actor_id) + "'");
}

Pose& StageState::pose(std::string_view actor_id) {
  return const_cast<Pose&>(std::as_const(*this).pose(actor_id));
}

double StageState::distance() const {
  if (poses.size() < 2) return 0.0;
  const Pose& a = poses[0].pose;
  const Pose& b = poses[1].pose;
  return std::hypot(a.x - b.x, a.y - b.y);
}

StageBounds stage_bounds(const EngineConfig& cfg) {
  return {cfg.stage_width / 2.0, cfg.stage_depth / 2.0};
}

StageState initial_stage(const Script& script, const EngineConfig& cfg) {
  if (script.characters.size() != 2)
    throw std::invalid_argument("a performance needs exactly two characters");
  const double half = cfg.initial_separation / 2.0;
  return {{{script.characters[0].id, {-half, 0.0, 0.0}},
           {script.characters[1].id, {half, 0.0, kPi}}}};
}

bool faces_partner(const StageState& stage, std::string_view actor_id) {
  return facing_sign(stage.pose(actor_id), stage.pose(partner_of(stage, actor_id))) == 1;
}

std::optional<Transform> spatial_decision(const Delta& delta, const StageState& stage,
                                          std::string_view actor_id, const EngineConfig& cfg,
                                          std::vector<std::string>* warnings) {
  if (delta.direction == Direction::none) return std::nullopt;
  const double radial = delta.direction == Direction::toward ? cfg.step_size : -cfg.step_size;
  const double m = feasible_step(stage, actor_id, radial, cfg);
  if (m <= 1e-12) {
    if (warnings)
      warnings->push_back(std::string(actor_id) + ": " + std::string(to_string(delta.direction)) +
                          " step suppressed");
    return std::nullopt;
  }
  return Translation{radial_omega(stage, actor_id, radial < 0 ? -m : m)};
}

std::optional<Transform> rotation_decision(const ActionEntry& entry, Role role,
                                           const StageState& stage, std::string_view actor_id) {
  if (role != Role::agent || entry.engagement == Engagement::neutral) return std::nullopt;
  const Pose& self = stage.pose(actor_id);
  const Pose& other = stage.pose(partner_of(stage, actor_id));
  double target = bearing_to(self, other);
  if (entry.engagement == Engagement::disengage) target = normalize_heading(target + kPi);
  const double theta = shortest_rotation(self.heading, target);
  if (std::abs(theta) < kAngleEps) return std::nullopt;
  return Rotation{theta};
}

const GestureSpec& proximity_guard(const GestureSpec& gesture,
                                   std::span<const ResolvedEnactment> candidates,
                                   const GestureDB& db, double distance, const EngineConfig& cfg,
                                   std::vector<std::string>* warnings) {
  if (!gesture.has(GestureFlag::sweeping) || distance >= cfg.min_distance + kReachMargin)
    return gesture;
  auto usable = [&](const GestureSpec* g) {
    return g != nullptr && g->fits(cfg.platform) &&
           (g->can(GestureKind::iconic) || g->can(GestureKind::deictic) ||
            g->can(GestureKind::metaphoric));
  };
  if (gesture.subtle_variant) {
    const GestureSpec* v = db.find(*gesture.subtle_variant);
    if (usable(v)) return *v;
  }
  const GestureSpec* best = nullptr;
  int best_weight = 0;
  for (const auto& [g, app] : candidates) {
    if (g->has(GestureFlag::sweeping) || !usable(g)) continue;
    if (app.weight() > best_weight) {
      best = g;
      best_weight = app.weight();
    }
  }
  if (best != nullptr) return *best;
  if (warnings)
    warnings->push_back("sweeping gesture '" + gesture.gesture_id + "' kept at distance " +
                        fmt(distance) + " m: no quieter alternative");
  return gesture;
}

std::vector<std::optional<CohesiveCue>> schedule_cohesives(const Script& script,
                                                           const ActionKB& kb) {
  std::map<std::string, int> occurrences;
  std::vector<std::string> first_seen;
  for (const auto& a : script.actions) {
    if (occurrences[a.patient]++ == 0) first_seen.push_back(a.patient);
  }
  std::map<std::string, std::string> binding;
  std::size_t k = 0;
  for (const auto& motif : first_seen) {
    if (occurrences[motif] < 2) continue;
    if (kb.cohesive_pool().empty())
      throw KbError("character '" + motif + "' recurs but the KB cohesive pool is empty");
    binding[motif] = kb.cohesive_pool()[k++ % kb.cohesive_pool().size()];
  }
  std::vector<std::optional<CohesiveCue>> out;
  for (const auto& a : script.actions) {
    auto it = binding.find(a.patient);
    if (it == binding.end())
      out.emplace_back();
    else
      out.push_back(CohesiveCue{a.patient, it->second});
  }
  return out;
}

std::size_t drop_conflicting_beats(Slot& slot) {
  std::vector<MovementEvent> cohesives;
  for (const auto& t : slot.tracks) {
    for (const auto& e : t.events) {
      if (e.kind == MovementKind::cohesive) cohesives.push_back(e);
    }
  }
  std::size_t dropped = 0;
  for (auto& t : slot.tracks) {
    auto clash = [&](const MovementEvent& e) {
      if (e.kind != MovementKind::beat) return false;
      return std::any_of(cohesives.begin(), cohesives.end(),
                         [&](const MovementEvent& c) { return overlaps(c, e); });
    };
    const auto before = t.events.size();
    t.events.erase(std::remove_if(t.events.begin(), t.events.end(), clash), t.events.end());
    dropped += before - t.events.size();
  }
  return dropped;
}

MovementKind mapped_kind(ConstrualKind construal, const GestureSpec& g) {
  if (construal != ConstrualKind::literal) {
    if (g.can(GestureKind::metaphoric)) return MovementKind::metaphoric;
    if (g.can(GestureKind::iconic)) return MovementKind::iconic;
    if (g.can(GestureKind::deictic)) return MovementKind::deictic;
  } else {
    if (g.can(GestureKind::iconic)) return MovementKind::iconic;
    if (g.can(GestureKind::deictic)) return MovementKind::deictic;
    if (g.can(GestureKind::metaphoric)) return MovementKind::metaphoric;
  }
  throw InterpretationError("gesture '" + g.gesture_id + "' cannot enact an action");
}

namespace {

// The coherent stage and its mirror, planned in lockstep.
struct PairedStage {
  StageState coherent;
  StageState mirror;

  const StageState& output(Mode mode) const {
    return mode == Mode::incoherent_spatial ? mirror : coherent;
  }
};

struct BodyPlan {
  std::vector<MovementEvent> events;           // onsets relative to the block start
  std::vector<std::vector<Condition>> holds;   // per event: conditions that hold
};

std::string narration_for(const Script& script, const PlotAction& action,
                          const ActionEntry& entry, Connective connective) {
  auto name = [&](const std::string& id) {
    const Character* c = script.find_character(id);
    return c != nullptr && !c->display_name.empty() ? c->display_name : id;
  };
  std::ostringstream os;
  if (action.index > 0) os << to_string(connective) << ' ';
  os << name(action.agent) << ' ' << action.action_id << ' ' << name(action.patient);
  if (!entry.dialogue_agent.empty())
    os << " | " << name(action.agent) << ": \"" << entry.dialogue_agent << '"';
  if (!entry.dialogue_patient.empty())
    os << " | " << name(action.patient) << ": \"" << entry.dialogue_patient << '"';
  return os.str();
}

// Plans the body movements of one actor and applies them to both stages.
BodyPlan plan_body(const ActionEntry& entry, Role role, const std::string& actor,
                   const Delta& delta, PairedStage& stage, Mode mode, const EngineConfig& cfg,
                   std::vector<std::string>& warnings) {
  BodyPlan plan;
  if (!has_locomotion(cfg)) {
    if (delta.direction != Direction::none || (role == Role::agent &&
                                               entry.engagement != Engagement::neutral))
      warnings.push_back(actor + ": platform has no locomotion; body movement skipped");
    return plan;
  }
  const StageBounds bounds = stage_bounds(cfg);
  double t = 0.0;

  auto turn_c = rotation_decision(entry, role, stage.coherent, actor);
  auto turn_m = rotation_decision(entry, role, stage.mirror, actor);
  const auto& turn = mode == Mode::incoherent_spatial ? turn_m : turn_c;
  if (turn) {
    const bool visible_before = faces_partner(stage.coherent, actor) &&
                                faces_partner(stage.mirror, actor);
    if (turn_c) stage.coherent.pose(actor) = rotate_pose(stage.coherent.pose(actor),
                                                         std::get<Rotation>(*turn_c).theta);
    if (turn_m) stage.mirror.pose(actor) = rotate_pose(stage.mirror.pose(actor),
                                                       std::get<Rotation>(*turn_m).theta);
    const bool visible_after = faces_partner(stage.coherent, actor) &&
                               faces_partner(stage.mirror, actor);
    const double theta = std::get<Rotation>(*turn).theta;
    MovementEvent e{MovementKind::rotational, std::nullopt, *turn, t, turn_duration(theta),
                    Justification::engagement_turn, {}};
    t = e.end_s();
    plan.events.push_back(e);
    plan.holds.push_back(visible_before && visible_after
                             ? std::vector<Condition>{Condition::walk_safe,
                                                      Condition::target_still_visible}
                             : std::vector<Condition>{Condition::walk_safe});
  }

  if (delta.direction != Direction::none) {
    const double radial = delta.direction == Direction::toward ? cfg.step_size : -cfg.step_size;
    const double m = std::min(feasible_step(stage.coherent, actor, radial, cfg),
                              feasible_step(stage.mirror, actor, -radial, cfg));
    if (m <= 1e-12) {
      warnings.push_back(actor + ": " + std::string(to_string(delta.direction)) +
                         " step suppressed by distance or stage limits");
    } else {
      if (m < std::abs(radial) - 1e-12)
        warnings.push_back(actor + ": step shortened to " + fmt(m) + " m at the stage edge");
      const double signed_m = radial < 0 ? -m : m;
      const double omega_c = radial_omega(stage.coherent, actor, signed_m);
      const double omega_m = radial_omega(stage.mirror, actor, -signed_m);
      const bool visible = faces_partner(stage.coherent, actor) &&
                           faces_partner(stage.mirror, actor);
      stage.coherent.pose(actor) = translate_pose(stage.coherent.pose(actor), omega_c, bounds);
      stage.mirror.pose(actor) = translate_pose(stage.mirror.pose(actor), omega_m, bounds);
      const double omega = mode == Mode::incoherent_spatial ? omega_m : omega_c;
      MovementEvent e{MovementKind::spatial, std::nullopt, Translation{omega}, t, kStepDuration,
                      Justification::delta_step, {}};
      plan.events.push_back(e);
      plan.holds.push_back(visible ? std::vector<Condition>{Condition::walk_safe,
                                                            Condition::target_still_visible}
                                   : std::vector<Condition>{Condition::walk_safe});
    }
  }
  return plan;
}

// Places a body block at `start`, annotating restricted overlaps with the
// gesture. Returns false when some overlap cannot be justified.
bool place_body(const BodyPlan& plan, double start, const MovementEvent& gesture,
                const GestureSpec& spec, std::vector<MovementEvent>& out) {
  std::vector<MovementEvent> placed;
  for (std::size_t i = 0; i < plan.events.size(); ++i) {
    MovementEvent e = plan.events[i];
    e.onset_s += start;
    if (overlaps(e, gesture)) {
      switch (can_combine(e.kind, gesture.kind)) {
        case Legality::combinable: break;
        case Legality::exclusive: return false;
        case Legality::restricted: {
          const Condition need = *restriction_condition(e.kind, gesture.kind);
          const auto& holds = plan.holds[i];
          const bool held = std::find(holds.begin(), holds.end(), need) != holds.end() &&
                            (need != Condition::walk_safe || spec.has(GestureFlag::walk_safe));
          if (!held) return false;
          e.conditions.push_back(need);
          break;
        }
      }
    }
    placed.push_back(std::move(e));
  }
  out.insert(out.end(), placed.begin(), placed.end());
  return true;
}

RoleTrace role_trace(const CharacterStep& cs, const ActionEntry& entry, Role role,
                     const Construal& construal, const GestureSpec& gesture) {
  RoleTrace r;
  r.character_id = cs.character_id;
  r.role = role;
  r.prev_context = cs.prev_context;
  r.valence = cs.valence;
  r.context = cs.context;
  r.delta = cs.delta;
  r.arousal = entry.arousal(role);
  r.armed = armed_links(entry, cs.prev_context, cs.valence);
  r.construal = construal;
  r.gesture_id = gesture.gesture_id;
  r.dialogue = entry.dialogue(role);
  return r;
}

}  // namespace

Timeline plan_performance(const Script& script, const ActionKB& kb, const GestureDB& db,
                          const EngineConfig& cfg, Mode mode, InterpretationTrace* trace) {
  check_config(cfg);
  Timeline tl;
  tl.mode = mode;
  tl.config = cfg;
  tl.actors = script.characters;
  tl.initial_stage = initial_stage(script, cfg);
  PairedStage stage{tl.initial_stage, tl.initial_stage};

  const ValenceRun run = run_valence(script, kb, cfg);
  const auto cues = schedule_cohesives(script, kb);
  SeededStream rng(cfg.rng_seed);
  if (trace) {
    trace->seed = cfg.rng_seed;
    trace->steps.clear();
  }

  std::vector<const GestureSpec*> random_pool;
  if (mode == Mode::incoherent_gesture) {
    for (const auto& g : db.gestures()) {
      if (g.fits(cfg.platform) && (g.can(GestureKind::iconic) || g.can(GestureKind::deictic) ||
                                   g.can(GestureKind::metaphoric)))
        random_pool.push_back(&g);
    }
    if (random_pool.empty()) throw InterpretationError("no gesture in the DB can enact actions");
  }

  for (const auto& action : script.actions) {
    const ActionEntry& entry = kb.at(action.action_id);
    const StepValence& sv = run.steps[action.index];
    const double guard_distance = std::min(stage.coherent.distance(), stage.mirror.distance());

    struct Mapped {
      Construal construal;
      const GestureSpec* gesture;
      MovementEvent event;
    };
    auto map_role = [&](Role role, const CharacterStep& cs) {
      Construal construal = construe(entry, role, cs.prev_context, cs.valence, kb, cfg);
      const auto candidates =
          platform_enactments(kb, db, construal.enacted_action_id, role, cfg.platform);
      const GestureSpec* g = nullptr;
      Justification just = Justification::mapping;
      if (mode == Mode::incoherent_gesture) {
        g = random_pool[rng.below(random_pool.size())];
        just = Justification::incoherent_baseline;
      } else {
        g = &select_enactment(construal, role, kb, db, entry.arousal(role), rng, cfg.platform);
      }
      g = &proximity_guard(*g, candidates, db, guard_distance, cfg, &tl.warnings);
      MovementEvent e{mapped_kind(construal.kind, *g), g->gesture_id, std::nullopt, 0.0,
                      g->duration_s, just, {}};
      return Mapped{std::move(construal), g, std::move(e)};
    };
    Mapped agent = map_role(Role::agent, sv.agent);
    Mapped patient = map_role(Role::patient, sv.patient);

    Slot slot;
    slot.index = action.index;
    slot.action_id = action.action_id;
    slot.agent = action.agent;
    slot.patient = action.patient;
    slot.connective = sv.connective;
    slot.connective_in = action.connective_in;
    slot.narration = narration_for(script, action, entry, sv.connective);
    slot.agent_construal = agent.construal;
    slot.patient_construal = patient.construal;
    for (const auto& c : script.characters) slot.tracks.push_back({c.id, {}});

    patient.event.onset_s = agent.event.duration_s / 2.0;
    const double reaction_end = patient.event.end_s();
    const double agent_free = agent.event.end_s();

    Track& agent_track = slot.track(action.agent);
    Track& patient_track = slot.track(action.patient);
    agent_track.events.push_back(agent.event);
    patient_track.events.push_back(patient.event);

    BodyPlan agent_body =
        plan_body(entry, Role::agent, action.agent, sv.agent.delta, stage, mode, cfg, tl.warnings);
    if (!place_body(agent_body, reaction_end, agent.event, *agent.gesture, agent_track.events)) {
      [[maybe_unused]] bool ok = place_body(agent_body, std::max(reaction_end, agent_free),
                                            agent.event, *agent.gesture, agent_track.events);
    }
    BodyPlan patient_body = plan_body(entry, Role::patient, action.patient, sv.patient.delta,
                                      stage, mode, cfg, tl.warnings);
    if (!place_body(patient_body, reaction_end, patient.event, *patient.gesture,
                    patient_track.events)) {
      [[maybe_unused]] bool ok =
          place_body(patient_body, std::max(reaction_end, patient.event.end_s()), patient.event,
                     *patient.gesture, patient_track.events);
    }

    if (const auto& cue = cues[action.index]) {
      const GestureSpec& g = db.at(cue->gesture_id);
      agent_track.events.push_back({MovementKind::cohesive, g.gesture_id, std::nullopt, agent_free,
                                    g.duration_s, Justification::cohesive, {}});
    }
    if (sv.connective == Connective::then && !kb.beat_pool().empty()) {
      const GestureSpec& g = db.at(kb.beat_pool()[action.index % kb.beat_pool().size()]);
      patient_track.events.push_back({MovementKind::beat, g.gesture_id, std::nullopt,
                                      std::max(reaction_end, agent_free), g.duration_s,
                                      Justification::beat, {}});
    }
    drop_conflicting_beats(slot);
    for (auto& t : slot.tracks) {
      std::stable_sort(t.events.begin(), t.events.end(),
                       [](const MovementEvent& a, const MovementEvent& b) {
                         return a.onset_s < b.onset_s;
                       });
    }

    if (trace) {
      StepTrace st;
      st.index = action.index;
      st.action_id = action.action_id;
      st.connective = sv.connective;
      st.connective_in = action.connective_in;
      st.agent = role_trace(sv.agent, entry, Role::agent, agent.construal, *agent.gesture);
      st.patient = role_trace(sv.patient, entry, Role::patient, patient.construal,
                              *patient.gesture);
      trace->steps.push_back(std::move(st));
    }
    tl.slots.push_back(std::move(slot));
  }

  tl.final_stage = stage.output(mode);
  const auto problems = check_timeline_legality(tl, db);
  if (has_errors(problems)) {
    std::ostringstream os;
    os << "planner produced an illegal timeline:";
    for (const auto& d : problems) os << "\n  " << d.message;
    throw LegalityError(os.str());
  }
  return tl;
}

std::vector<Diagnostic> check_timeline_legality(const Timeline& timeline, const GestureDB& db) {
  std::vector<Diagnostic> out;
  auto error = [&](const Slot& s, const Track& t, std::string msg) {
    out.push_back({Severity::error,
                   "slot " + std::to_string(s.index) + ", " + t.actor_id + ": " + std::move(msg),
                   {}});
  };
  for (std::size_t i = 0; i < timeline.slots.size(); ++i) {
    const Slot& s = timeline.slots[i];
    if (s.index != i) out.push_back({Severity::error, "slot indices are not contiguous", {}});
    for (const auto& t : s.tracks) {
      for (const auto& e : t.events) {
        if (!(e.duration_s > 0.0)) error(s, t, "event '" + e.label() + "' has no duration");
        if (is_gesture_kind(e.kind) != e.gesture_id.has_value() ||
            is_body_movement(e.kind) != e.transform.has_value())
          error(s, t, "event '" + e.label() + "' does not match its kind");
        if (e.gesture_id && db.find(*e.gesture_id) == nullptr)
          error(s, t, "unknown gesture '" + *e.gesture_id + "'");
      }
      for (std::size_t a = 0; a < t.events.size(); ++a) {
        for (std::size_t b = a + 1; b < t.events.size(); ++b) {
          const auto& x = t.events[a];
          const auto& y = t.events[b];
          if (!overlaps(x, y)) continue;
          const Legality l = can_combine(x.kind, y.kind);
          const std::string pair = x.label() + " with " + y.label();
          if (l == Legality::exclusive) {
            error(s, t, "exclusive overlap of " + pair);
          } else if (l == Legality::restricted) {
            const Condition need = *restriction_condition(x.kind, y.kind);
            const MovementEvent& body = is_body_movement(x.kind) ? x : y;
            const MovementEvent& gesture = is_body_movement(x.kind) ? y : x;
            const bool named = std::find(body.conditions.begin(), body.conditions.end(), need) !=
                               body.conditions.end();
            const GestureSpec* g = gesture.gesture_id ? db.find(*gesture.gesture_id) : nullptr;
            if (!named)
              error(s, t, "restricted overlap of " + pair + " without " +
                              std::string(to_string(need)));
            else if (need == Condition::walk_safe && (g == nullptr ||
                                                      !g->has(GestureFlag::walk_safe)))
              error(s, t, "restricted overlap of " + pair + ": gesture is not walk_safe");
          }
        }
      }
    }
  }
  return out;
}

StageState replay_stage(const Timeline& timeline) {
  StageState stage = timeline.initial_stage;
  const StageBounds bounds = stage_bounds(timeline.config);
  for (const auto& s : timeline.slots) {
    for (const auto& t : s.tracks) {
      std::vector<const MovementEvent*> order;
      for (const auto& e : t.events) {
        if (e.transform) order.push_back(&e);
      }
      std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
        return a->end_s() < b->end_s();
      });
      for (const auto* e : order) stage.pose(t.actor_id) = apply_transform(stage.pose(t.actor_id),
                                                                            *e->transform, bounds);
    }
  }
  return stage;
}

namespace {

std::string transform_text(const std::optional<Transform>& t) {
  if (!t) return "none";
  if (const auto* tr = std::get_if<Translation>(&*t)) return "translate " + fmt(tr->omega);
  return "rotate " + fmt(std::get<Rotation>(*t).theta);
}

std::string conditions_text(const std::vector<Condition>& cs) {
  std::string s;
  for (auto c : cs) {
    if (!s.empty()) s += ",";
    s += to_string(c);
  }
  return s;
}

std::string construal_text(const Construal& c) {
  return std::string(to_string(c.kind)) + ":" + c.enacted_action_id + "/" + c.spoken_action_id;
}

}  // namespace

std::vector<EventDiff> diff_timelines(const Timeline& a, const Timeline& b) {
  std::vector<EventDiff> out;
  auto add = [&](std::size_t slot, std::string actor, std::size_t event, std::string field,
                 std::string before, std::string after) {
    if (before != after)
      out.push_back({slot, std::move(actor), event, std::move(field), std::move(before),
                     std::move(after), std::nullopt, std::nullopt});
  };
  add(0, "", 0, "slot_count", std::to_string(a.slots.size()), std::to_string(b.slots.size()));
  const std::size_t n = std::min(a.slots.size(), b.slots.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Slot& x = a.slots[i];
    const Slot& y = b.slots[i];
    add(i, "", 0, "action_id", x.action_id, y.action_id);
    add(i, "", 0, "connective", std::string(to_string(x.connective)),
        std::string(to_string(y.connective)));
    add(i, "", 0, "narration", x.narration, y.narration);
    add(i, "", 0, "agent_construal", construal_text(x.agent_construal),
        construal_text(y.agent_construal));
    add(i, "", 0, "patient_construal", construal_text(x.patient_construal),
        construal_text(y.patient_construal));
    add(i, "", 0, "track_count", std::to_string(x.tracks.size()), std::to_string(y.tracks.size()));
    for (std::size_t t = 0; t < std::min(x.tracks.size(), y.tracks.size()); ++t) {
      const Track& tx = x.tracks[t];
      const Track& ty = y.tracks[t];
      add(i, tx.actor_id, 0, "actor", tx.actor_id, ty.actor_id);
      add(i, tx.actor_id, 0, "event_count", std::to_string(tx.events.size()),
          std::to_string(ty.events.size()));
      for (std::size_t e = 0; e < std::min(tx.events.size(), ty.events.size()); ++e) {
        const MovementEvent& ex = tx.events[e];
        const MovementEvent& ey = ty.events[e];
        add(i, tx.actor_id, e, "kind", std::string(to_string(ex.kind)),
            std::string(to_string(ey.kind)));
        add(i, tx.actor_id, e, "gesture_id", ex.gesture_id.value_or("none"),
            ey.gesture_id.value_or("none"));
        const std::size_t before = out.size();
        add(i, tx.actor_id, e, "transform", transform_text(ex.transform),
            transform_text(ey.transform));
        if (out.size() > before) {
          auto value = [](const std::optional<Transform>& t) -> std::optional<double> {
            if (!t) return std::nullopt;
            if (const auto* tr = std::get_if<Translation>(&*t)) return tr->omega;
            return std::get<Rotation>(*t).theta;
          };
          out.back().before_value = value(ex.transform);
          out.back().after_value = value(ey.transform);
        }
        add(i, tx.actor_id, e, "onset_s", fmt(ex.onset_s), fmt(ey.onset_s));
        add(i, tx.actor_id, e, "duration_s", fmt(ex.duration_s), fmt(ey.duration_s));
        add(i, tx.actor_id, e, "justification", std::string(to_string(ex.justification)),
            std::string(to_string(ey.justification)));
        add(i, tx.actor_id, e, "conditions", conditions_text(ex.conditions),
            conditions_text(ey.conditions));
      }
    }
  }
  return out;
}

}  // namespace stagecraft
