#include <doctest.h>

#include <random>

#include "stagecraft/valence.hpp"
#include "support.hpp"

using namespace stagecraft;

namespace {

ScriptError parse_error(std::string_view src) {
  try {
    parse_script(src);
  } catch (const ScriptError& e) {
    return e;
  }
  FAIL("expected a ScriptError");
  return ScriptError({}, "");
}

}  // namespace

TEST_CASE("minimal script parses") {
  Script s = parse_script("characters: A=Alice, B=Bob\nA insult B");
  REQUIRE(s.actions.size() == 1);
  CHECK(s.characters.size() == 2);
  CHECK(s.characters[0].display_name == "Alice");
  CHECK(s.actions[0].agent == "A");
  CHECK(s.actions[0].patient == "B");
  CHECK(s.actions[0].action_id == "insult");
  CHECK_FALSE(s.actions[0].connective_in.has_value());
}

TEST_CASE("leading connective is kept") {
  Script s = parse_script("characters: A=Alice, B=Bob\nA praise B\nbut B insult A\n");
  REQUIRE(s.actions.size() == 2);
  CHECK(s.actions[1].connective_in == Connective::but);
  CHECK(s.actions[1].agent == "B");
}

TEST_CASE("dots are legal in action names") {
  Script s = parse_script("characters: A=Ann, B=Ben\nA disagree.with B\n");
  CHECK(s.actions[0].action_id == "disagree.with");
  CHECK(is_valid_action_name("break.with"));
  CHECK(is_valid_action_name("a-b_c.9"));
  CHECK_FALSE(is_valid_action_name("Insult"));
  CHECK_FALSE(is_valid_action_name("9lives"));
  CHECK_FALSE(is_valid_action_name(""));
}

TEST_CASE("positions are attached to every element") {
  Script s = parse_script("# comment\ncharacters: A=Alice, B=Bob\n\n  then A praise B\n");
  CHECK(s.characters[0].pos == SourcePos{2, 13});
  CHECK(s.characters[1].pos == SourcePos{2, 22});
  CHECK(s.actions[0].pos.line == 4);
  CHECK(s.actions[0].pos.column == 3);
}

TEST_CASE("comments and blank lines are ignored") {
  Script s = parse_script(
      "characters: A=Alice, B=Bob  # the pair\n\n# nothing here\nA meet B # hello\n\r\n");
  CHECK(s.actions.size() == 1);
  CHECK(s.characters[1].display_name == "Bob");
}

TEST_CASE("syntax errors carry line, column and expected tokens") {
  SUBCASE("unknown leading word") {
    auto e = parse_error("characters: A=Alice, B=Bob\nmaybe A insult B\n");
    CHECK(e.pos().line == 2);
    CHECK(e.pos().column == 1);
    CHECK_FALSE(e.expected().empty());
  }
  SUBCASE("missing patient") {
    auto e = parse_error("characters: A=Alice, B=Bob\nA insult\n");
    CHECK(e.pos().line == 2);
    CHECK(std::string(e.what()).find("expected") != std::string::npos);
  }
  SUBCASE("bad action name") {
    auto e = parse_error("characters: A=Alice, B=Bob\nA Insult B\n");
    CHECK(e.pos() == SourcePos{2, 3});
  }
  SUBCASE("action before header") {
    auto e = parse_error("A insult B\n");
    CHECK(e.pos() == SourcePos{1, 1});
  }
  SUBCASE("no actions") {
    auto e = parse_error("characters: A=Alice, B=Bob\n");
    CHECK(e.detail().find("no actions") != std::string::npos);
  }
  SUBCASE("four words read as a connective line") {
    auto e = parse_error("characters: A=Alice, B=Bob\nA insult B loudly\n");
    CHECK(e.pos() == SourcePos{2, 1});
    CHECK(e.expected().size() == 3);
  }
  SUBCASE("trailing token") {
    auto e = parse_error("characters: A=Alice, B=Bob\nbut A insult B loudly\n");
    CHECK(e.pos() == SourcePos{2, 16});
  }
}

TEST_CASE("character declaration errors") {
  CHECK(parse_error("characters: A=Alice, A=Ann\nA meet A\n").detail().find("duplicate") !=
        std::string::npos);
  CHECK(parse_error("characters: A=Alice, B=Bob\nA meet C\n").detail().find("undeclared") !=
        std::string::npos);
  CHECK(parse_error("characters: A=Alice, B=Bob, C=Cat\nA meet B\n").detail().find("secondary") !=
        std::string::npos);
  CHECK(parse_error("characters: A=Alice, B=Bob\nA meet A\n").detail().find("differ") !=
        std::string::npos);
  CHECK(parse_error("characters: but=Alice, B=Bob\nB meet but\n").pos().line == 1);
  CHECK(parse_error("characters: A=Alice\nA meet A\n").pos().line >= 1);
}

TEST_CASE("indices are contiguous and follow the text") {
  Script s = testing::fixture_script("scenario3");
  REQUIRE(s.actions.size() == 5);
  const char* expected[] = {"overwork", "underpay", "scold", "command", "fire"};
  for (std::size_t i = 0; i < s.actions.size(); ++i) {
    CHECK(s.actions[i].index == i);
    CHECK(s.actions[i].action_id == expected[i]);
  }
}

TEST_CASE("serialize then parse is structurally equal") {
  for (const char* name : {"scenario1", "scenario2", "scenario3", "unroll", "neutral", "irony"}) {
    Script s = testing::fixture_script(name);
    CHECK(structurally_equal(parse_script(serialize_script(s)), s));
  }
  std::mt19937_64 gen(11);
  for (int i = 0; i < 300; ++i) {
    Script s = testing::random_script(gen, 12);
    Script back = parse_script(serialize_script(s));
    REQUIRE(structurally_equal(back, s));
    CHECK(serialize_script(back) == serialize_script(s));
  }
}

TEST_CASE("fuzzed input either parses or fails with a positioned error") {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> len(0, 120);
  const std::string alphabet = "characters:=, ABab#\n\t butthenso.-_xyz09\r";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  const std::string valid = "characters: A=Alice, B=Bob\nA praise B\nbut B insult A\n";
  std::uniform_int_distribution<std::size_t> where(0, valid.size());
  int parsed = 0;
  for (int i = 0; i < 4000; ++i) {
    std::string src;
    switch (i % 3) {
      case 0:
        for (int k = len(gen); k > 0; --k) src.push_back(static_cast<char>(byte(gen)));
        break;
      case 1:
        for (int k = len(gen); k > 0; --k) src.push_back(alphabet[pick(gen)]);
        break;
      default:
        src = valid;
        src.insert(where(gen), 1, alphabet[pick(gen)]);
        src.erase(where(gen) % src.size(), 1);
        break;
    }
    try {
      Script s = parse_script(src);
      ++parsed;
      CHECK(!s.actions.empty());
    } catch (const ScriptError& e) {
      CHECK(e.pos().line >= 1);
      CHECK(e.pos().column >= 1);
    }
  }
  CHECK(parsed > 0);
}

TEST_CASE("validate_script against the fixture KB") {
  const auto& kb = testing::fixture_kb();
  SUBCASE("KB actions only") {
    CHECK(validate_script(testing::fixture_script("scenario1"), kb).empty());
    CHECK(validate_script(testing::fixture_script("scenario3"), kb).empty());
  }
  SUBCASE("unknown action") {
    Script s = parse_script("characters: A=Alice, B=Bob\nA praise B\nthen A fly.to.moon B\n");
    auto d = validate_script(s, kb);
    REQUIRE(d.size() == 1);
    CHECK(d[0].severity == Severity::error);
    CHECK(d[0].message.find("fly.to.moon") != std::string::npos);
    CHECK(d[0].pos.line == 3);
  }
  SUBCASE("written connectives that disagree are warnings") {
    Script s = parse_script(
        "characters: A=Alice, B=Bob\nA befriend B\nso A praise B\nthen B insult A\n");
    EngineConfig cfg;
    // Oracle: run the classifier directly on the hand-computed contexts.
    const Connective step2 = classify_connective(4.8, 8.0, 1.92, cfg);
    CHECK(step2 == Connective::then);
    const Connective step3 = classify_connective(6.72, -6.0, -7.632, cfg);
    CHECK(step3 == Connective::but);
    auto d = validate_script(s, kb, cfg);
    REQUIRE(d.size() == 2);
    for (const auto& x : d) CHECK(x.severity == Severity::warning);
    CHECK(d[0].pos.line == 3);
    CHECK(d[1].pos.line == 4);
    CHECK_FALSE(has_errors(d));
  }
}
