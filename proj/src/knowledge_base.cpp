#include "stagecraft/knowledge_base.hpp"

#include <algorithm>
#include <cmath>

#include "stagecraft/script.hpp"

namespace stagecraft {

using nlohmann::json;

namespace {

template <typename E, std::size_t N>
E enum_from(const std::string& s, const std::pair<E, std::string_view> (&table)[N],
            std::string_view what) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  throw KbError("unknown " + std::string(what) + " '" + s + "'");
}

constexpr std::pair<Engagement, std::string_view> kEngagements[] = {
    {Engagement::engage, "engage"},
    {Engagement::disengage, "disengage"},
    {Engagement::neutral, "neutral"}};
constexpr std::pair<AppropriatenessLevel, std::string_view> kLevels[] = {
    {AppropriatenessLevel::high, "high"},
    {AppropriatenessLevel::medium, "medium"},
    {AppropriatenessLevel::low, "low"}};
constexpr std::pair<LinkMode, std::string_view> kModes[] = {{LinkMode::shock, "shock"},
                                                           {LinkMode::reinforce, "reinforce"}};
constexpr std::pair<GestureKind, std::string_view> kKinds[] = {
    {GestureKind::iconic, "iconic"},
    {GestureKind::deictic, "deictic"},
    {GestureKind::metaphoric, "metaphoric"},
    {GestureKind::cohesive, "cohesive"},
    {GestureKind::beat, "beat"}};
constexpr std::pair<SchemaLabel, std::string_view> kSchemas[] = {
    {SchemaLabel::up, "up"},     {SchemaLabel::down, "down"},   {SchemaLabel::near, "near"},
    {SchemaLabel::far, "far"},   {SchemaLabel::front, "front"}, {SchemaLabel::back, "back"}};
constexpr std::pair<GestureFlag, std::string_view> kFlags[] = {
    {GestureFlag::sweeping, "sweeping"},
    {GestureFlag::walk_safe, "walk_safe"},
    {GestureFlag::subtle, "subtle"}};

template <typename E, std::size_t N>
std::string_view enum_name(E e, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "?";
}

const json& required(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw KbError(where + ": missing field '" + key + "'");
  return *it;
}

int scale_value(const json& obj, const char* key, const std::string& where) {
  const json& v = required(obj, key, where);
  if (!v.is_number_integer()) throw KbError(where + "." + key + ": expected an integer");
  int value = v.get<int>();
  if (value < kScaleMin || value > kScaleMax) {
    throw KbError(where + "." + key + " = " + std::to_string(value) + " is outside [" +
                  std::to_string(kScaleMin) + ", " + std::to_string(kScaleMax) + "]");
  }
  return value;
}

EmotionVector emotion_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw KbError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k != "inspiration" && k != "attraction" && k != "support" && k != "respect")
      throw KbError(where + ": unknown scale '" + k + "'");
  }
  EmotionVector v;
  v.inspiration = scale_value(j, "inspiration", where);
  v.attraction = scale_value(j, "attraction", where);
  v.support = scale_value(j, "support", where);
  v.respect = scale_value(j, "respect", where);
  return v;
}

json emotion_to_json(const EmotionVector& v) {
  return {{"inspiration", v.inspiration},
          {"attraction", v.attraction},
          {"support", v.support},
          {"respect", v.respect}};
}

int arousal_value(const json& obj, const char* key, const std::string& where) {
  const json& v = required(obj, key, where);
  if (!v.is_number_integer()) throw KbError(where + "." + key + ": expected an integer");
  int value = v.get<int>();
  if (value < 0 || value > kArousalMax)
    throw KbError(where + "." + key + " = " + std::to_string(value) + " is outside [0, 3]");
  return value;
}

std::vector<Enactment> enactments_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw KbError(where + ": expected an array");
  std::vector<Enactment> out;
  for (const auto& e : j) {
    Enactment en;
    en.gesture_id = required(e, "gesture_id", where).get<std::string>();
    en.appropriateness.level =
        enum_from(required(e, "appropriateness", where).get<std::string>(), kLevels,
                  "appropriateness level");
    out.push_back(std::move(en));
  }
  return out;
}

json enactments_to_json(const std::vector<Enactment>& list) {
  json out = json::array();
  for (const auto& e : list) {
    out.push_back({{"gesture_id", e.gesture_id},
                   {"appropriateness", enum_name(e.appropriateness.level, kLevels)}});
  }
  return out;
}

template <typename E, std::size_t N>
std::set<E> enum_set(const json& j, const std::pair<E, std::string_view> (&table)[N],
                     std::string_view what, const std::string& where) {
  if (!j.is_array()) throw KbError(where + ": expected an array of " + std::string(what));
  std::set<E> out;
  for (const auto& v : j) out.insert(enum_from(v.get<std::string>(), table, what));
  return out;
}

template <typename E, std::size_t N>
json enum_set_to_json(const std::set<E>& s, const std::pair<E, std::string_view> (&table)[N]) {
  json out = json::array();
  for (auto e : s) out.push_back(enum_name(e, table));
  return out;
}

void check_format(const json& j, std::string_view format) {
  if (!j.is_object()) throw KbError("document must be a JSON object");
  auto it = j.find("format");
  if (it != j.end() && it->get<std::string>() != format)
    throw KbError("expected format '" + std::string(format) + "', got '" +
                  it->get<std::string>() + "'");
  auto v = j.find("version");
  if (v != j.end() && v->get<int>() != 1)
    throw KbError("unsupported version " + std::to_string(v->get<int>()));
}

json parse_json(std::string_view source) {
  try {
    return json::parse(source.begin(), source.end());
  } catch (const json::parse_error& e) {
    throw KbError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string_view to_string(Role r) { return r == Role::agent ? "agent" : "patient"; }
std::string_view to_string(Engagement e) { return enum_name(e, kEngagements); }
std::string_view to_string(AppropriatenessLevel a) { return enum_name(a, kLevels); }
std::string_view to_string(LinkMode m) { return enum_name(m, kModes); }
std::string_view to_string(GestureKind k) { return enum_name(k, kKinds); }
std::string_view to_string(SchemaLabel s) { return enum_name(s, kSchemas); }
std::string_view to_string(GestureFlag f) { return enum_name(f, kFlags); }

bool GestureSpec::fits(const std::set<Hardware>& platform) const {
  return std::all_of(hardware.begin(), hardware.end(),
                     [&](Hardware h) { return platform.count(h) != 0; });
}

GestureDB::GestureDB(std::vector<GestureSpec> gestures) : gestures_(std::move(gestures)) {
  for (std::size_t i = 0; i < gestures_.size(); ++i) {
    const auto& g = gestures_[i];
    if (g.gesture_id.empty()) throw KbError("gesture #" + std::to_string(i) + ": empty id");
    if (!(g.duration_s > 0.0) || !std::isfinite(g.duration_s))
      throw KbError("gesture '" + g.gesture_id + "': duration_s must be positive");
    if (g.has(GestureFlag::sweeping) && g.has(GestureFlag::subtle))
      throw KbError("gesture '" + g.gesture_id + "': sweeping and subtle are mutually exclusive");
    if (!index_.emplace(g.gesture_id, i).second)
      throw KbError("duplicate gesture id '" + g.gesture_id + "'");
  }
  for (const auto& g : gestures_) {
    if (!g.subtle_variant) continue;
    const GestureSpec* v = find(*g.subtle_variant);
    if (v == nullptr)
      throw KbError("gesture '" + g.gesture_id + "': subtle_variant '" + *g.subtle_variant +
                    "' is not in the DB");
    if (!v->has(GestureFlag::subtle))
      throw KbError("gesture '" + g.gesture_id + "': subtle_variant '" + v->gesture_id +
                    "' is not flagged subtle");
  }
}

const GestureSpec* GestureDB::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &gestures_[it->second];
}

const GestureSpec& GestureDB::at(std::string_view id) const {
  const GestureSpec* g = find(id);
  if (g == nullptr) throw KbError("unknown gesture '" + std::string(id) + "'");
  return *g;
}

ActionKB::ActionKB(std::vector<ActionEntry> actions, std::vector<std::string> cohesive_pool,
                   std::vector<std::string> beat_pool)
    : actions_(std::move(actions)),
      cohesive_pool_(std::move(cohesive_pool)),
      beat_pool_(std::move(beat_pool)) {
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    const auto& a = actions_[i];
    if (!is_valid_action_name(a.action_id))
      throw KbError("action #" + std::to_string(i) + ": invalid action id '" + a.action_id + "'");
    if (!index_.emplace(a.action_id, i).second)
      throw KbError("duplicate action id '" + a.action_id + "'");
    for (const EmotionVector* v : {&a.scales_A, &a.scales_B}) {
      for (int s : {v->inspiration, v->attraction, v->support, v->respect}) {
        if (s < kScaleMin || s > kScaleMax)
          throw KbError("action '" + a.action_id + "': scale value " + std::to_string(s) +
                        " is outside [-3, 3]");
      }
    }
    if (a.arousal_A < 0 || a.arousal_A > kArousalMax || a.arousal_B < 0 ||
        a.arousal_B > kArousalMax)
      throw KbError("action '" + a.action_id + "': arousal must lie in [0, 3]");
    if (a.enactments_agent.empty() || a.enactments_patient.empty())
      throw KbError("action '" + a.action_id + "': every role needs at least one enactment");
    for (const auto& link : a.metaphor_links) {
      if (!(link.threshold > 0.0) || !std::isfinite(link.threshold))
        throw KbError("action '" + a.action_id + "': metaphor threshold must be positive");
    }
  }
  for (const auto& a : actions_) {
    for (const auto& link : a.metaphor_links) {
      if (!contains(link.target_action_id))
        throw KbError("action '" + a.action_id + "': metaphor target '" + link.target_action_id +
                      "' is not in the KB");
    }
    if (a.irony_expectation && !contains(*a.irony_expectation)) {
      warnings_.push_back("action '" + a.action_id + "': irony expectation '" +
                          *a.irony_expectation + "' is not in the KB");
    }
  }
}

const ActionEntry* ActionKB::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &actions_[it->second];
}

const ActionEntry& ActionKB::at(std::string_view id) const {
  const ActionEntry* a = find(id);
  if (a == nullptr) throw KbError("unknown action '" + std::string(id) + "'");
  return *a;
}

ActionKB action_kb_from_json(const json& j) {
  check_format(j, "stagecraft.kb");
  std::vector<ActionEntry> actions;
  const json& list = required(j, "actions", "kb");
  if (!list.is_array()) throw KbError("kb.actions: expected an array");
  try {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const json& e = list[i];
      std::string where = "actions[" + std::to_string(i) + "]";
      ActionEntry a;
      a.action_id = required(e, "action_id", where).get<std::string>();
      where = "action '" + a.action_id + "'";
      a.scales_A = emotion_from_json(required(e, "scales_A", where), where + ".scales_A");
      a.scales_B = emotion_from_json(required(e, "scales_B", where), where + ".scales_B");
      a.arousal_A = arousal_value(e, "arousal_A", where);
      a.arousal_B = arousal_value(e, "arousal_B", where);
      a.engagement =
          enum_from(required(e, "engagement", where).get<std::string>(), kEngagements,
                    "engagement");
      a.dialogue_agent = required(e, "dialogue_agent", where).get<std::string>();
      a.dialogue_patient = required(e, "dialogue_patient", where).get<std::string>();
      a.enactments_agent =
          enactments_from_json(required(e, "enactments_agent", where), where + ".enactments_agent");
      a.enactments_patient = enactments_from_json(required(e, "enactments_patient", where),
                                                  where + ".enactments_patient");
      if (auto it = e.find("metaphor_links"); it != e.end()) {
        for (const auto& l : *it) {
          MetaphorLink link;
          link.target_action_id = required(l, "target_action_id", where).get<std::string>();
          link.mode = enum_from(required(l, "mode", where).get<std::string>(), kModes, "link mode");
          link.threshold = required(l, "threshold", where).get<double>();
          a.metaphor_links.push_back(std::move(link));
        }
      }
      if (auto it = e.find("irony_expectation"); it != e.end() && !it->is_null())
        a.irony_expectation = it->get<std::string>();
      actions.push_back(std::move(a));
    }
    std::vector<std::string> cohesive, beat;
    if (auto it = j.find("cohesive_pool"); it != j.end())
      cohesive = it->get<std::vector<std::string>>();
    if (auto it = j.find("beat_pool"); it != j.end()) beat = it->get<std::vector<std::string>>();
    return ActionKB(std::move(actions), std::move(cohesive), std::move(beat));
  } catch (const json::exception& e) {
    throw KbError(std::string("kb: ") + e.what());
  }
}

ActionKB load_action_kb(std::string_view source) { return action_kb_from_json(parse_json(source)); }

json action_kb_to_json(const ActionKB& kb) {
  json actions = json::array();
  for (const auto& a : kb.actions()) {
    json links = json::array();
    for (const auto& l : a.metaphor_links) {
      links.push_back({{"target_action_id", l.target_action_id},
                       {"mode", enum_name(l.mode, kModes)},
                       {"threshold", l.threshold}});
    }
    json e = {{"action_id", a.action_id},
              {"scales_A", emotion_to_json(a.scales_A)},
              {"scales_B", emotion_to_json(a.scales_B)},
              {"arousal_A", a.arousal_A},
              {"arousal_B", a.arousal_B},
              {"engagement", enum_name(a.engagement, kEngagements)},
              {"dialogue_agent", a.dialogue_agent},
              {"dialogue_patient", a.dialogue_patient},
              {"enactments_agent", enactments_to_json(a.enactments_agent)},
              {"enactments_patient", enactments_to_json(a.enactments_patient)},
              {"metaphor_links", links}};
    if (a.irony_expectation) e["irony_expectation"] = *a.irony_expectation;
    actions.push_back(std::move(e));
  }
  return {{"format", "stagecraft.kb"},
          {"version", 1},
          {"cohesive_pool", kb.cohesive_pool()},
          {"beat_pool", kb.beat_pool()},
          {"actions", actions}};
}

GestureDB gesture_db_from_json(const json& j) {
  check_format(j, "stagecraft.gestures");
  const json& list = required(j, "gestures", "gesture db");
  if (!list.is_array()) throw KbError("gestures: expected an array");
  std::vector<GestureSpec> out;
  try {
    for (std::size_t i = 0; i < list.size(); ++i) {
      const json& g = list[i];
      std::string where = "gestures[" + std::to_string(i) + "]";
      GestureSpec s;
      s.gesture_id = required(g, "gesture_id", where).get<std::string>();
      where = "gesture '" + s.gesture_id + "'";
      s.short_desc = required(g, "short_desc", where).get<std::string>();
      s.long_desc = required(g, "long_desc", where).get<std::string>();
      s.duration_s = required(g, "duration_s", where).get<double>();
      s.kind_capabilities =
          enum_set(required(g, "kind_capabilities", where), kKinds, "gesture kind", where);
      s.schema_labels = enum_set(required(g, "schema_labels", where), kSchemas, "schema label",
                                 where);
      if (auto it = g.find("hardware"); it != g.end()) {
        for (const auto& h : *it) {
          try {
            s.hardware.insert(hardware_from_string(h.get<std::string>()));
          } catch (const ConfigError& e) {
            throw KbError(where + ": " + e.what());
          }
        }
      }
      if (auto it = g.find("flags"); it != g.end()) s.flags = enum_set(*it, kFlags, "flag", where);
      if (auto it = g.find("subtle_variant"); it != g.end() && !it->is_null())
        s.subtle_variant = it->get<std::string>();
      if (s.kind_capabilities.empty()) throw KbError(where + ": kind_capabilities is empty");
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw KbError(std::string("gesture db: ") + e.what());
  }
  return GestureDB(std::move(out));
}

GestureDB load_gesture_db(std::string_view source) {
  return gesture_db_from_json(parse_json(source));
}

json gesture_db_to_json(const GestureDB& db) {
  json list = json::array();
  for (const auto& g : db.gestures()) {
    json hw = json::array();
    for (auto h : g.hardware) hw.push_back(to_string(h));
    json e = {{"gesture_id", g.gesture_id},
              {"short_desc", g.short_desc},
              {"long_desc", g.long_desc},
              {"duration_s", g.duration_s},
              {"kind_capabilities", enum_set_to_json(g.kind_capabilities, kKinds)},
              {"schema_labels", enum_set_to_json(g.schema_labels, kSchemas)},
              {"hardware", hw},
              {"flags", enum_set_to_json(g.flags, kFlags)}};
    if (g.subtle_variant) e["subtle_variant"] = *g.subtle_variant;
    list.push_back(std::move(e));
  }
  return {{"format", "stagecraft.gestures"}, {"version", 1}, {"gestures", list}};
}

std::vector<ResolvedEnactment> enactments_for(const ActionKB& kb, const GestureDB& db,
                                              std::string_view action_id, Role role) {
  const ActionEntry& entry = kb.at(action_id);
  std::vector<ResolvedEnactment> out;
  for (const auto& e : entry.enactments(role)) {
    const GestureSpec* g = db.find(e.gesture_id);
    if (g == nullptr)
      throw KbError("action '" + entry.action_id + "' (" + std::string(to_string(role)) +
                    "): gesture '" + e.gesture_id + "' is not in the gesture DB");
    out.emplace_back(g, e.appropriateness);
  }
  return out;
}

std::optional<MetaphorLink> metaphor_target_for(const ActionKB& kb, std::string_view action_id,
                                                LinkMode mode) {
  const ActionEntry* entry = kb.find(action_id);
  if (entry == nullptr) return std::nullopt;
  for (const auto& link : entry->metaphor_links) {
    if (link.mode == mode) return link;
  }
  return std::nullopt;
}

std::vector<Diagnostic> check_kb_closure(const ActionKB& kb, const GestureDB& db,
                                         const std::set<Hardware>& platform) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string msg) { out.push_back({Severity::error, std::move(msg), {}}); };
  for (const auto& a : kb.actions()) {
    for (Role role : {Role::agent, Role::patient}) {
      bool usable = false;
      for (const auto& e : a.enactments(role)) {
        const GestureSpec* g = db.find(e.gesture_id);
        if (g == nullptr) {
          error("action '" + a.action_id + "' (" + std::string(to_string(role)) +
                "): gesture '" + e.gesture_id + "' is not in the gesture DB");
          continue;
        }
        if (!g->can(GestureKind::iconic) && !g->can(GestureKind::deictic) &&
            !g->can(GestureKind::metaphoric)) {
          error("action '" + a.action_id + "': gesture '" + g->gesture_id +
                "' cannot enact an action (needs an iconic, deictic or metaphoric capability)");
          continue;
        }
        if (g->fits(platform)) usable = true;
      }
      if (!usable)
        error("action '" + a.action_id + "' (" + std::string(to_string(role)) +
              "): no enactment fits the platform hardware");
    }
  }
  auto check_pool = [&](const std::vector<std::string>& pool, GestureKind kind,
                        std::string_view name) {
    if (pool.empty()) error("kb declares an empty " + std::string(name) + " pool");
    for (const auto& id : pool) {
      const GestureSpec* g = db.find(id);
      if (g == nullptr)
        error(std::string(name) + " pool: gesture '" + id + "' is not in the gesture DB");
      else if (!g->can(kind))
        error(std::string(name) + " pool: gesture '" + id + "' is not a " +
              std::string(to_string(kind)) + " gesture");
      else if (!g->fits(platform))
        error(std::string(name) + " pool: gesture '" + id + "' does not fit the platform");
    }
  };
  check_pool(kb.cohesive_pool(), GestureKind::cohesive, "cohesive");
  check_pool(kb.beat_pool(), GestureKind::beat, "beat");
  for (const auto& w : kb.load_warnings()) out.push_back({Severity::warning, w, {}});
  return out;
}

}  // namespace stagecraft
