#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace stagecraft {

enum class Hardware { arms, hands, pointing_limb, locomotion };

/// Tunables for one run. Every field mirrors a key in the JSON config file.
struct EngineConfig {
  double decay_weight = 0.6;     // beta: weight of the current action
  double step_threshold = 3.0;   // tau: |delta| needed for a step
  double connective_but = 6.0;
  double connective_so = 2.0;
  bool irony_enabled = false;
  double irony_threshold = 8.0;
  double step_size = 0.25;       // meters
  double min_distance = 0.5;     // meters
  std::uint64_t rng_seed = 0;

  // Stage geometry: a width x depth rectangle centred on the origin.
  double stage_width = 4.0;
  double stage_depth = 3.0;
  double initial_separation = 2.0;

  std::set<Hardware> platform{Hardware::arms, Hardware::hands, Hardware::pointing_limb,
                              Hardware::locomotion};

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Returns one message per violated constraint; empty when the config is usable.
std::vector<std::string> config_problems(const EngineConfig& cfg);

/// Throws ConfigError listing every violated constraint.
void check_config(const EngineConfig& cfg);

/// Overlays keys present in `j` onto `base`. Unknown keys are rejected.
EngineConfig config_from_json(const nlohmann::json& j, EngineConfig base = {});
nlohmann::json config_to_json(const EngineConfig& cfg);

std::string to_string(Hardware h);
Hardware hardware_from_string(const std::string& s);

}  // namespace stagecraft
