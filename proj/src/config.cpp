#include "stagecraft/config.hpp"

#include <cmath>
#include <sstream>

namespace stagecraft {

std::string to_string(Hardware h) {
  switch (h) {
    case Hardware::arms: return "arms";
    case Hardware::hands: return "hands";
    case Hardware::pointing_limb: return "pointing_limb";
    case Hardware::locomotion: return "locomotion";
  }
  return "?";
}

Hardware hardware_from_string(const std::string& s) {
  if (s == "arms") return Hardware::arms;
  if (s == "hands") return Hardware::hands;
  if (s == "pointing_limb") return Hardware::pointing_limb;
  if (s == "locomotion") return Hardware::locomotion;
  throw ConfigError("unknown hardware '" + s + "'");
}

std::vector<std::string> config_problems(const EngineConfig& cfg) {
  std::vector<std::string> out;
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(cfg.decay_weight) || cfg.decay_weight <= 0.0 || cfg.decay_weight >= 1.0)
    out.push_back("decay_weight must lie strictly between 0 and 1");
  if (!finite(cfg.step_threshold) || cfg.step_threshold <= 0.0)
    out.push_back("step_threshold must be positive");
  if (!finite(cfg.connective_so) || cfg.connective_so <= 0.0)
    out.push_back("connective_so must be positive");
  if (!finite(cfg.connective_but) || cfg.connective_but <= 0.0)
    out.push_back("connective_but must be positive");
  if (cfg.connective_so >= cfg.connective_but)
    out.push_back("connective_so must be smaller than connective_but");
  if (!finite(cfg.irony_threshold) || cfg.irony_threshold <= 0.0)
    out.push_back("irony_threshold must be positive");
  if (!finite(cfg.step_size) || cfg.step_size <= 0.0) out.push_back("step_size must be positive");
  if (!finite(cfg.min_distance) || cfg.min_distance <= 0.0)
    out.push_back("min_distance must be positive");
  if (!finite(cfg.stage_width) || !finite(cfg.stage_depth) || cfg.stage_width <= 0.0 ||
      cfg.stage_depth <= 0.0)
    out.push_back("stage dimensions must be positive");
  if (!finite(cfg.initial_separation) || cfg.initial_separation <= 0.0 ||
      cfg.initial_separation > cfg.stage_width)
    out.push_back("initial_separation must be positive and fit on the stage");
  if (cfg.min_distance >= cfg.initial_separation)
    out.push_back("min_distance must be smaller than initial_separation");
  return out;
}

void check_config(const EngineConfig& cfg) {
  auto problems = config_problems(cfg);
  if (problems.empty()) return;
  std::ostringstream os;
  os << "invalid config:";
  for (const auto& p : problems) os << "\n  " << p;
  throw ConfigError(os.str());
}

EngineConfig config_from_json(const nlohmann::json& j, EngineConfig cfg) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    const auto& v = it.value();
    try {
      if (key == "decay_weight") cfg.decay_weight = v.get<double>();
      else if (key == "step_threshold") cfg.step_threshold = v.get<double>();
      else if (key == "connective_but") cfg.connective_but = v.get<double>();
      else if (key == "connective_so") cfg.connective_so = v.get<double>();
      else if (key == "irony_enabled") cfg.irony_enabled = v.get<bool>();
      else if (key == "irony_threshold") cfg.irony_threshold = v.get<double>();
      else if (key == "step_size") cfg.step_size = v.get<double>();
      else if (key == "min_distance") cfg.min_distance = v.get<double>();
      else if (key == "rng_seed") cfg.rng_seed = v.get<std::uint64_t>();
      else if (key == "stage_width") cfg.stage_width = v.get<double>();
      else if (key == "stage_depth") cfg.stage_depth = v.get<double>();
      else if (key == "initial_separation") cfg.initial_separation = v.get<double>();
      else if (key == "platform") {
        cfg.platform.clear();
        for (const auto& h : v) cfg.platform.insert(hardware_from_string(h.get<std::string>()));
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  return cfg;
}

nlohmann::json config_to_json(const EngineConfig& cfg) {
  nlohmann::json platform = nlohmann::json::array();
  for (auto h : cfg.platform) platform.push_back(to_string(h));
  return {
      {"decay_weight", cfg.decay_weight},
      {"step_threshold", cfg.step_threshold},
      {"connective_but", cfg.connective_but},
      {"connective_so", cfg.connective_so},
      {"irony_enabled", cfg.irony_enabled},
      {"irony_threshold", cfg.irony_threshold},
      {"step_size", cfg.step_size},
      {"min_distance", cfg.min_distance},
      {"rng_seed", cfg.rng_seed},
      {"stage_width", cfg.stage_width},
      {"stage_depth", cfg.stage_depth},
      {"initial_separation", cfg.initial_separation},
      {"platform", platform},
  };
}

}  // namespace stagecraft
