#include "stagecraft/timeline_json.hpp"

#include <stdexcept>

namespace stagecraft {

using nlohmann::json;

namespace {

template <typename E, typename F>
E parse_enum(const json& v, F from_string, const char* what) {
  const auto s = v.get<std::string>();
  auto e = from_string(s);
  if (!e) throw std::runtime_error(std::string("unknown ") + what + " '" + s + "'");
  return *e;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw std::runtime_error(std::string("timeline: missing field '") + key + "'");
  return *it;
}

json link_to_json(const MetaphorLink& l) {
  return {{"target_action_id", l.target_action_id},
          {"mode", to_string(l.mode)},
          {"threshold", l.threshold}};
}

MetaphorLink link_from_json(const json& j) {
  MetaphorLink l;
  l.target_action_id = field(j, "target_action_id").get<std::string>();
  const auto mode = field(j, "mode").get<std::string>();
  if (mode == "shock") l.mode = LinkMode::shock;
  else if (mode == "reinforce") l.mode = LinkMode::reinforce;
  else throw std::runtime_error("unknown link mode '" + mode + "'");
  l.threshold = field(j, "threshold").get<double>();
  return l;
}

json construal_to_json(const Construal& c) {
  return {{"kind", to_string(c.kind)},
          {"source_action_id", c.source_action_id},
          {"enacted_action_id", c.enacted_action_id},
          {"spoken_action_id", c.spoken_action_id},
          {"link", c.link ? link_to_json(*c.link) : json(nullptr)}};
}

Construal construal_from_json(const json& j) {
  Construal c;
  c.kind = parse_enum<ConstrualKind>(field(j, "kind"), construal_kind_from_string, "construal");
  c.source_action_id = field(j, "source_action_id").get<std::string>();
  c.enacted_action_id = field(j, "enacted_action_id").get<std::string>();
  c.spoken_action_id = field(j, "spoken_action_id").get<std::string>();
  if (j.contains("link") && !j["link"].is_null()) c.link = link_from_json(j["link"]);
  return c;
}

json transform_to_json(const Transform& t) {
  if (const auto* tr = std::get_if<Translation>(&t))
    return {{"type", "translation"}, {"omega", tr->omega}};
  return {{"type", "rotation"}, {"theta", std::get<Rotation>(t).theta}};
}

Transform transform_from_json(const json& j) {
  const auto type = field(j, "type").get<std::string>();
  if (type == "translation") return Translation{field(j, "omega").get<double>()};
  if (type == "rotation") return Rotation{field(j, "theta").get<double>()};
  throw std::runtime_error("unknown transform type '" + type + "'");
}

json event_to_json(const MovementEvent& e) {
  json conditions = json::array();
  for (auto c : e.conditions) conditions.push_back(to_string(c));
  return {{"kind", to_string(e.kind)},
          {"gesture_id", e.gesture_id ? json(*e.gesture_id) : json(nullptr)},
          {"transform", e.transform ? transform_to_json(*e.transform) : json(nullptr)},
          {"onset_s", e.onset_s},
          {"duration_s", e.duration_s},
          {"justification", to_string(e.justification)},
          {"conditions", conditions}};
}

MovementEvent event_from_json(const json& j) {
  MovementEvent e;
  e.kind = parse_enum<MovementKind>(field(j, "kind"), movement_kind_from_string, "movement kind");
  if (!field(j, "gesture_id").is_null()) e.gesture_id = j["gesture_id"].get<std::string>();
  if (!field(j, "transform").is_null()) e.transform = transform_from_json(j["transform"]);
  e.onset_s = field(j, "onset_s").get<double>();
  e.duration_s = field(j, "duration_s").get<double>();
  e.justification =
      parse_enum<Justification>(field(j, "justification"), justification_from_string,
                                "justification");
  for (const auto& c : field(j, "conditions"))
    e.conditions.push_back(parse_enum<Condition>(c, condition_from_string, "condition"));
  return e;
}

StageState stage_from_json(const json& j) {
  StageState s;
  for (const auto& p : field(j, "poses")) {
    s.poses.push_back({field(p, "actor").get<std::string>(),
                       {field(p, "x").get<double>(), field(p, "y").get<double>(),
                        field(p, "heading").get<double>()}});
  }
  return s;
}

json delta_to_json(const Delta& d) {
  return {{"value", d.value}, {"significant", d.significant}, {"direction", to_string(d.direction)}};
}

json role_trace_to_json(const RoleTrace& r) {
  json armed = json::array();
  for (const auto& l : r.armed) armed.push_back(link_to_json(l));
  return {{"character", r.character_id},
          {"role", to_string(r.role)},
          {"context",
           {{"prev_context", r.prev_context},
            {"valence", r.valence},
            {"context", r.context},
            {"delta", delta_to_json(r.delta)},
            {"arousal", r.arousal},
            {"armed_links", armed}}},
          {"presentation",
           {{"construal", construal_to_json(r.construal)},
            {"gesture_id", r.gesture_id},
            {"dialogue", r.dialogue}}}};
}

}  // namespace

json stage_to_json(const StageState& stage) {
  json poses = json::array();
  for (const auto& p : stage.poses) {
    poses.push_back(
        {{"actor", p.actor_id}, {"x", p.pose.x}, {"y", p.pose.y}, {"heading", p.pose.heading}});
  }
  return {{"poses", poses}, {"distance", stage.distance()}};
}

json timeline_to_json(const Timeline& tl) {
  json actors = json::array();
  for (const auto& c : tl.actors) actors.push_back({{"id", c.id}, {"display_name", c.display_name}});
  json slots = json::array();
  for (const auto& s : tl.slots) {
    json tracks = json::array();
    for (const auto& t : s.tracks) {
      json events = json::array();
      for (const auto& e : t.events) events.push_back(event_to_json(e));
      tracks.push_back({{"actor", t.actor_id}, {"events", events}});
    }
    slots.push_back(
        {{"index", s.index},
         {"action_id", s.action_id},
         {"agent", s.agent},
         {"patient", s.patient},
         {"connective", to_string(s.connective)},
         {"connective_in", s.connective_in ? json(to_string(*s.connective_in)) : json(nullptr)},
         {"narration", s.narration},
         {"duration_s", s.duration_s()},
         {"construals",
          {{"agent", construal_to_json(s.agent_construal)},
           {"patient", construal_to_json(s.patient_construal)}}},
         {"tracks", tracks}});
  }
  return {{"format", kTimelineFormat},
          {"version", tl.version},
          {"mode", to_string(tl.mode)},
          {"config", config_to_json(tl.config)},
          {"actors", actors},
          {"initial_stage", stage_to_json(tl.initial_stage)},
          {"slots", slots},
          {"final_stage", stage_to_json(tl.final_stage)},
          {"warnings", tl.warnings}};
}

Timeline timeline_from_json(const json& j) {
  if (field(j, "format") != kTimelineFormat) throw std::runtime_error("not a timeline document");
  Timeline tl;
  tl.version = field(j, "version").get<int>();
  if (tl.version != kTimelineVersion)
    throw std::runtime_error("unsupported timeline version " + std::to_string(tl.version));
  tl.mode = parse_enum<Mode>(field(j, "mode"), mode_from_string, "mode");
  tl.config = config_from_json(field(j, "config"));
  for (const auto& a : field(j, "actors"))
    tl.actors.push_back({field(a, "id").get<std::string>(),
                         field(a, "display_name").get<std::string>(), {}});
  tl.initial_stage = stage_from_json(field(j, "initial_stage"));
  for (const auto& sj : field(j, "slots")) {
    Slot s;
    s.index = field(sj, "index").get<std::size_t>();
    s.action_id = field(sj, "action_id").get<std::string>();
    s.agent = field(sj, "agent").get<std::string>();
    s.patient = field(sj, "patient").get<std::string>();
    s.connective = parse_enum<Connective>(field(sj, "connective"), connective_from_string,
                                          "connective");
    if (!field(sj, "connective_in").is_null())
      s.connective_in = parse_enum<Connective>(sj["connective_in"], connective_from_string,
                                               "connective");
    s.narration = field(sj, "narration").get<std::string>();
    const auto& cj = field(sj, "construals");
    s.agent_construal = construal_from_json(field(cj, "agent"));
    s.patient_construal = construal_from_json(field(cj, "patient"));
    for (const auto& tj : field(sj, "tracks")) {
      Track t;
      t.actor_id = field(tj, "actor").get<std::string>();
      for (const auto& ej : field(tj, "events")) t.events.push_back(event_from_json(ej));
      s.tracks.push_back(std::move(t));
    }
    tl.slots.push_back(std::move(s));
  }
  tl.final_stage = stage_from_json(field(j, "final_stage"));
  tl.warnings = field(j, "warnings").get<std::vector<std::string>>();
  return tl;
}

json trace_to_json(const InterpretationTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    steps.push_back(
        {{"index", s.index},
         {"reference",
          {{"action_id", s.action_id},
           {"agent", s.agent.character_id},
           {"patient", s.patient.character_id},
           {"connective_in", s.connective_in ? json(to_string(*s.connective_in)) : json(nullptr)}}},
         {"connective", to_string(s.connective)},
         {"agent", role_trace_to_json(s.agent)},
         {"patient", role_trace_to_json(s.patient)}});
  }
  return {{"format", kTraceFormat}, {"version", 1}, {"seed", trace.seed}, {"steps", steps}};
}

json diff_to_json(const std::vector<EventDiff>& diff) {
  json out = json::array();
  for (const auto& d : diff) {
    out.push_back({{"slot", d.slot},
                   {"actor", d.actor},
                   {"event", d.event},
                   {"field", d.field},
                   {"before", d.before},
                   {"after", d.after}});
  }
  return out;
}

std::string dump_document(const json& j) { return j.dump(2) + "\n"; }

json combination_matrix_to_json() {
  json kinds = json::array();
  json rows = json::array();
  for (auto a : kAllMovementKinds) {
    kinds.push_back(to_string(a));
    json row = json::array();
    for (auto b : kAllMovementKinds) row.push_back(to_string(can_combine(a, b)));
    rows.push_back(row);
  }
  return {{"format", "stagecraft.matrix"}, {"version", 1}, {"kinds", kinds}, {"rows", rows}};
}

std::vector<std::string> check_combination_matrix(const json& j) {
  std::vector<std::string> out;
  try {
    if (j.value("format", "") != "stagecraft.matrix") out.push_back("not a matrix document");
    const auto kinds = field(j, "kinds").get<std::vector<std::string>>();
    const auto& rows = field(j, "rows");
    if (kinds.size() != kAllMovementKinds.size() || rows.size() != kinds.size()) {
      out.push_back("matrix must be 7x7");
      return out;
    }
    for (std::size_t r = 0; r < kinds.size(); ++r) {
      auto a = movement_kind_from_string(kinds[r]);
      if (!a) {
        out.push_back("unknown movement kind '" + kinds[r] + "'");
        continue;
      }
      if (rows[r].size() != kinds.size()) {
        out.push_back("row " + kinds[r] + " must have 7 entries");
        continue;
      }
      for (std::size_t c = 0; c < kinds.size(); ++c) {
        auto b = movement_kind_from_string(kinds[c]);
        auto l = legality_from_string(rows[r][c].get<std::string>());
        if (!b) continue;
        if (!l) {
          out.push_back(kinds[r] + " x " + kinds[c] + ": unknown legality '" +
                        rows[r][c].get<std::string>() + "'");
        } else if (*l != can_combine(*a, *b)) {
          out.push_back(kinds[r] + " x " + kinds[c] + ": file says " +
                        std::string(to_string(*l)) + ", built-in table says " +
                        std::string(to_string(can_combine(*a, *b))));
        }
      }
    }
  } catch (const std::exception& e) {
    out.push_back(std::string("malformed matrix: ") + e.what());
  }
  return out;
}

}  // namespace stagecraft
