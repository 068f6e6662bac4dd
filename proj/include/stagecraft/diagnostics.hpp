#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stagecraft {

/// 1-based line and column in a source text. Zero means "no position".
struct SourcePos {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string message;
  SourcePos pos;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) {
    if (d.severity == Severity::error) return true;
  }
  return false;
}

inline std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
  if (d.pos.line > 0) os << d.pos.line << ':' << d.pos.column << ": ";
  os << (d.severity == Severity::error ? "error: " : "warning: ") << d.message;
  return os;
}

}  // namespace stagecraft
