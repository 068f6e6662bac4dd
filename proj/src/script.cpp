#include "stagecraft/script.hpp"

#include <algorithm>
#include <sstream>

#include "stagecraft/config.hpp"
#include "stagecraft/knowledge_base.hpp"
#include "stagecraft/valence.hpp"

namespace stagecraft {

namespace {

constexpr std::string_view kHeaderKeyword = "characters";

struct Token {
  std::string_view text;
  int column = 0;  // 1-based
};

bool is_space(char c) { return c == ' ' || c == '\t'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_character_id(std::string_view s) {
  if (s.empty() || !(is_lower(s[0]) || is_upper(s[0]))) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) {
    return is_lower(c) || is_upper(c) || is_digit(c) || c == '_';
  });
}

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

std::string_view trim(std::string_view s, int* offset = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && is_space(s[e - 1])) --e;
  if (offset != nullptr) *offset += static_cast<int>(b);
  return s.substr(b, e - b);
}

std::string squote(std::string_view s) { return "'" + std::string(s) + "'"; }

class Parser {
 public:
  explicit Parser(std::string_view source) : source_(source) {}

  Script run() {
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= source_.size()) {
      std::size_t nl = source_.find('\n', pos);
      std::string_view line =
          source_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      handle_line(line, line_no);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    if (!have_header_) {
      throw ScriptError({line_no, 1}, "missing characters header",
                        {std::string(kHeaderKeyword) + ":"});
    }
    if (script_.actions.empty()) {
      throw ScriptError({line_no, 1}, "script has no actions", {"<CharId>", "but", "then", "so"});
    }
    return std::move(script_);
  }

 private:
  void handle_line(std::string_view raw, int line_no) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
      unsigned char c = static_cast<unsigned char>(raw[i]);
      if (c < 0x20 && c != '\t') {
        throw ScriptError({line_no, static_cast<int>(i) + 1}, "control character in script");
      }
    }
    std::string_view line = raw.substr(0, raw.find('#'));
    int offset = 1;
    std::string_view content = trim(line, &offset);
    if (content.empty()) return;

    if (content.substr(0, kHeaderKeyword.size()) == kHeaderKeyword) {
      std::string_view rest = content.substr(kHeaderKeyword.size());
      int rest_col = offset + static_cast<int>(kHeaderKeyword.size());
      std::string_view after = trim(rest, &rest_col);
      if (!after.empty() && after.front() == ':') {
        if (have_header_) throw ScriptError({line_no, offset}, "duplicate characters header");
        parse_header(after.substr(1), line_no, rest_col + 1);
        return;
      }
    }
    if (!have_header_) {
      throw ScriptError({line_no, offset}, "expected the characters header before any action",
                        {std::string(kHeaderKeyword) + ":"});
    }
    parse_action(line, line_no);
  }

  void parse_header(std::string_view body, int line_no, int column) {
    std::vector<std::pair<std::string_view, int>> entries;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = body.find(',', start);
      std::string_view piece = body.substr(start, comma == std::string_view::npos ? body.npos
                                                                                   : comma - start);
      entries.emplace_back(piece, column + static_cast<int>(start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    for (auto [piece, col] : entries) {
      std::string_view entry = trim(piece, &col);
      if (entry.empty()) {
        throw ScriptError({line_no, col}, "empty character declaration", {"<CharId>=<name>"});
      }
      std::size_t eq = entry.find('=');
      if (eq == std::string_view::npos) {
        throw ScriptError({line_no, col + static_cast<int>(entry.size())},
                          "character declaration is missing '='", {"="});
      }
      int id_col = col;
      std::string_view id = trim(entry.substr(0, eq), &id_col);
      int name_col = col + static_cast<int>(eq) + 1;
      std::string_view name = trim(entry.substr(eq + 1), &name_col);
      if (!is_character_id(id)) {
        throw ScriptError({line_no, id_col}, "invalid character id " + squote(id),
                          {"<CharId> matching [A-Za-z][A-Za-z0-9_]*"});
      }
      if (connective_from_string(id)) {
        throw ScriptError({line_no, id_col},
                          "character id " + squote(id) + " collides with a connective keyword");
      }
      if (name.empty()) {
        throw ScriptError({line_no, name_col}, "character " + squote(id) + " has no name",
                          {"<name>"});
      }
      if (script_.find_character(id) != nullptr) {
        throw ScriptError({line_no, id_col}, "duplicate character id " + squote(id));
      }
      script_.characters.push_back({std::string(id), std::string(name), {line_no, id_col}});
    }
    if (script_.characters.size() < 2) {
      throw ScriptError({line_no, column}, "a script needs exactly two characters, got " +
                                               std::to_string(script_.characters.size()),
                        {","});
    }
    if (script_.characters.size() > 2) {
      const auto& extra = script_.characters[2];
      throw ScriptError(extra.pos,
                        "secondary character " + squote(extra.id) +
                            " is not supported; a script has exactly two focal characters");
    }
    have_header_ = true;
  }

  void expect_character(const Token& t, int line_no) const {
    if (!is_character_id(t.text)) {
      throw ScriptError({line_no, t.column}, "expected a character id, got " + squote(t.text),
                        declared_ids());
    }
    if (script_.find_character(t.text) == nullptr) {
      throw ScriptError({line_no, t.column}, "undeclared character " + squote(t.text),
                        declared_ids());
    }
  }

  std::vector<std::string> declared_ids() const {
    std::vector<std::string> ids;
    for (const auto& c : script_.characters) ids.push_back(c.id);
    return ids;
  }

  void parse_action(std::string_view line, int line_no) {
    std::vector<Token> tokens = tokenize(line);
    PlotAction action;
    action.index = script_.actions.size();
    std::size_t i = 0;
    if (auto conn = connective_from_string(tokens[0].text)) {
      action.connective_in = conn;
      i = 1;
    } else if (tokens.size() == 4) {
      throw ScriptError({line_no, tokens[0].column},
                        "expected a connective, got " + squote(tokens[0].text),
                        {"but", "then", "so"});
    }
    action.pos = {line_no, tokens[0].column};
    const int end_col = tokens.back().column + static_cast<int>(tokens.back().text.size());

    if (tokens.size() <= i) {
      throw ScriptError({line_no, end_col}, "expected a character id", declared_ids());
    }
    expect_character(tokens[i], line_no);
    action.agent = std::string(tokens[i].text);

    if (tokens.size() <= i + 1) {
      throw ScriptError({line_no, end_col}, "expected an action name",
                        {"<action_id> matching [a-z][a-z0-9._-]*"});
    }
    const Token& act = tokens[i + 1];
    if (!is_valid_action_name(act.text)) {
      throw ScriptError({line_no, act.column}, "invalid action name " + squote(act.text),
                        {"<action_id> matching [a-z][a-z0-9._-]*"});
    }
    action.action_id = std::string(act.text);

    if (tokens.size() <= i + 2) {
      throw ScriptError({line_no, end_col}, "expected a character id", declared_ids());
    }
    const Token& pat = tokens[i + 2];
    expect_character(pat, line_no);
    action.patient = std::string(pat.text);
    if (action.patient == action.agent) {
      throw ScriptError({line_no, pat.column},
                        "agent and patient must differ, both are " + squote(pat.text));
    }
    if (tokens.size() > i + 3) {
      throw ScriptError({line_no, tokens[i + 3].column},
                        "unexpected " + squote(tokens[i + 3].text) + " after the patient",
                        {"end of line", "#"});
    }
    script_.actions.push_back(std::move(action));
  }

  std::string_view source_;
  Script script_;
  bool have_header_ = false;
};

}  // namespace

std::string_view to_string(Connective c) {
  switch (c) {
    case Connective::but: return "but";
    case Connective::then: return "then";
    case Connective::so: return "so";
  }
  return "?";
}

std::optional<Connective> connective_from_string(std::string_view s) {
  if (s == "but") return Connective::but;
  if (s == "then") return Connective::then;
  if (s == "so") return Connective::so;
  return std::nullopt;
}

const Character* Script::find_character(std::string_view id) const {
  for (const auto& c : characters) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

bool structurally_equal(const Script& a, const Script& b) {
  if (a.characters.size() != b.characters.size() || a.actions.size() != b.actions.size())
    return false;
  for (std::size_t i = 0; i < a.characters.size(); ++i) {
    if (a.characters[i].id != b.characters[i].id ||
        a.characters[i].display_name != b.characters[i].display_name)
      return false;
  }
  for (std::size_t i = 0; i < a.actions.size(); ++i) {
    const auto& x = a.actions[i];
    const auto& y = b.actions[i];
    if (x.index != y.index || x.action_id != y.action_id || x.agent != y.agent ||
        x.patient != y.patient || x.connective_in != y.connective_in)
      return false;
  }
  return true;
}

ScriptError::ScriptError(SourcePos pos, std::string message, std::vector<std::string> expected)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << pos.line << ':' << pos.column << ": " << message;
        if (!expected.empty()) {
          os << " (expected ";
          for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i > 0) os << (i + 1 == expected.size() ? " or " : ", ");
            os << expected[i];
          }
          os << ')';
        }
        return os.str();
      }()),
      pos_(pos),
      detail_(std::move(message)),
      expected_(std::move(expected)) {}

bool is_valid_action_name(std::string_view name) {
  if (name.empty() || !is_lower(name[0])) return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) {
    return is_lower(c) || is_digit(c) || c == '.' || c == '_' || c == '-';
  });
}

Script parse_script(std::string_view source) { return Parser(source).run(); }

std::string serialize_script(const Script& script) {
  std::ostringstream os;
  os << kHeaderKeyword << ": ";
  for (std::size_t i = 0; i < script.characters.size(); ++i) {
    if (i > 0) os << ", ";
    os << script.characters[i].id << '=' << script.characters[i].display_name;
  }
  os << '\n';
  for (const auto& a : script.actions) {
    if (a.connective_in) os << to_string(*a.connective_in) << ' ';
    os << a.agent << ' ' << a.action_id << ' ' << a.patient << '\n';
  }
  return os.str();
}

std::vector<Diagnostic> validate_script(const Script& script, const ActionKB& kb,
                                        const EngineConfig& cfg) {
  std::vector<Diagnostic> out;
  if (script.characters.size() != 2) {
    out.push_back({Severity::error, "a script needs exactly two characters", {}});
  }
  if (script.actions.empty()) out.push_back({Severity::error, "script has no actions", {}});
  for (std::size_t i = 0; i < script.actions.size(); ++i) {
    const auto& a = script.actions[i];
    if (a.index != i) {
      out.push_back({Severity::error, "action index " + std::to_string(a.index) +
                                          " does not match its position " + std::to_string(i),
                     a.pos});
    }
    if (!kb.contains(a.action_id)) {
      out.push_back({Severity::error, "unknown action " + squote(a.action_id), a.pos});
    }
    for (const auto* id : {&a.agent, &a.patient}) {
      if (script.find_character(*id) == nullptr)
        out.push_back({Severity::error, "undeclared character " + squote(*id), a.pos});
    }
    if (a.agent == a.patient) {
      out.push_back({Severity::error,
                     "action " + squote(a.action_id) + " needs two distinct roles", a.pos});
    }
  }
  if (has_errors(out)) return out;

  ValenceRun run = run_valence(script, kb, cfg);
  for (std::size_t i = 0; i < script.actions.size(); ++i) {
    const auto& a = script.actions[i];
    if (!a.connective_in) continue;
    Connective derived = run.steps[i].connective;
    if (*a.connective_in != derived) {
      out.push_back({Severity::warning,
                     "connective '" + std::string(to_string(*a.connective_in)) + "' before " +
                         squote(a.action_id) + " disagrees with the emotional shift, which reads as '" +
                         std::string(to_string(derived)) + "'",
                     a.pos});
    }
  }
  return out;
}

std::vector<Diagnostic> validate_script(const Script& script, const ActionKB& kb) {
  return validate_script(script, kb, EngineConfig{});
}

}  // namespace stagecraft
