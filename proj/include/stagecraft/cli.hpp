#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "stagecraft/script.hpp"
#include "stagecraft/valence.hpp"

namespace stagecraft {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDiagnostics = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the command-line tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Column order of the `trace` CSV.
inline constexpr const char* kTraceCsvHeader =
    "slot,action,character,role,valence,prev_context,context,delta,direction,connective";

/// One row per (slot, character), agent first.
std::string valence_csv(const ValenceRun& run);

}  // namespace stagecraft
