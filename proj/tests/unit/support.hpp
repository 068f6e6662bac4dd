#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stagecraft/choreographer.hpp"
#include "stagecraft/knowledge_base.hpp"
#include "stagecraft/script.hpp"

namespace testing {

inline std::string data_path(const std::string& rel) {
  return std::string(STAGECRAFT_DATA_DIR) + "/" + rel;
}

inline std::string test_path(const std::string& rel) {
  return std::string(STAGECRAFT_TEST_DIR) + "/" + rel;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const stagecraft::ActionKB& fixture_kb() {
  static const stagecraft::ActionKB kb = stagecraft::load_action_kb(slurp(data_path("kb.json")));
  return kb;
}

inline const stagecraft::GestureDB& fixture_db() {
  static const stagecraft::GestureDB db =
      stagecraft::load_gesture_db(slurp(data_path("gestures.json")));
  return db;
}

inline stagecraft::Script fixture_script(const std::string& name) {
  return stagecraft::parse_script(slurp(data_path("scripts/" + name + ".story")));
}

/// Random two-character script over the fixture KB, 1..max_len actions.
inline stagecraft::Script random_script(std::mt19937_64& gen, std::size_t max_len) {
  const auto& actions = fixture_kb().actions();
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> conn(0, 3);
  std::ostringstream os;
  os << "characters: A=Alice, B=Bob\n";
  const std::size_t n = len(gen);
  for (std::size_t i = 0; i < n; ++i) {
    const int c = conn(gen);
    if (i > 0 && c < 3) os << (c == 0 ? "but " : c == 1 ? "then " : "so ");
    const bool a_first = coin(gen) == 0;
    os << (a_first ? "A " : "B ") << actions[pick(gen)].action_id << (a_first ? " B\n" : " A\n");
  }
  return stagecraft::parse_script(os.str());
}

}  // namespace testing
