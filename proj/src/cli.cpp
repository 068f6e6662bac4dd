#include "stagecraft/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stagecraft/choreographer.hpp"
#include "stagecraft/config.hpp"
#include "stagecraft/executor.hpp"
#include "stagecraft/knowledge_base.hpp"
#include "stagecraft/timeline_json.hpp"

namespace stagecraft {

namespace fs = std::filesystem;

namespace {

// Thrown to unwind with an exit code after the message is already printed.
struct Exit {
  int code;
};

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string read_file(const std::string& path, std::ostream& err, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot read " << what << " '" << path << "'\n";
    throw Exit{kExitUsage};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    err << "error: cannot write '" << path << "'\n";
    throw Exit{kExitUsage};
  }
}

struct Options {
  std::string script;
  std::string kb;
  std::string gestures;
  std::string config;
  std::string matrix;
  std::string out;
  std::string emit_trace;
  std::string mode;
  std::string scheduling = "round_robin";
  std::optional<std::uint64_t> seed;
  std::optional<double> beta;
  std::optional<double> tau;
};

struct Inputs {
  Script script;
  ActionKB kb;
  GestureDB db;
  EngineConfig cfg;
};

EngineConfig load_config(const Options& o, std::ostream& err) {
  EngineConfig cfg;
  try {
    if (!o.config.empty()) {
      auto j = nlohmann::json::parse(read_file(o.config, err, "config"));
      cfg = config_from_json(j);
    }
  } catch (const nlohmann::json::exception& e) {
    err << o.config << ": error: " << e.what() << '\n';
    throw Exit{kExitUsage};
  } catch (const ConfigError& e) {
    err << o.config << ": error: " << e.what() << '\n';
    throw Exit{kExitUsage};
  }
  if (o.seed) cfg.rng_seed = *o.seed;
  if (o.beta) cfg.decay_weight = *o.beta;
  if (o.tau) cfg.step_threshold = *o.tau;
  const auto problems = config_problems(cfg);
  if (!problems.empty()) {
    for (const auto& p : problems) err << "error: config: " << p << '\n';
    throw Exit{kExitUsage};
  }
  return cfg;
}

ActionKB load_kb(const std::string& path, std::ostream& err) {
  const std::string text = read_file(path, err, "KB");
  try {
    ActionKB kb = load_action_kb(text);
    for (const auto& w : kb.load_warnings()) err << path << ": warning: " << w << '\n';
    return kb;
  } catch (const std::exception& e) {
    err << path << ": error: " << e.what() << '\n';
    throw Exit{kExitDiagnostics};
  }
}

std::string gestures_path(const Options& o) {
  if (!o.gestures.empty()) return o.gestures;
  return (fs::path(o.kb).parent_path() / "gestures.json").string();
}

GestureDB load_db(const std::string& path, std::ostream& err) {
  const std::string text = read_file(path, err, "gesture DB");
  try {
    return load_gesture_db(text);
  } catch (const std::exception& e) {
    err << path << ": error: " << e.what() << '\n';
    throw Exit{kExitDiagnostics};
  }
}

Script load_script(const std::string& path, std::ostream& err) {
  const std::string text = read_file(path, err, "script");
  try {
    return parse_script(text);
  } catch (const ScriptError& e) {
    err << path << ':' << e.what() << '\n';
    throw Exit{kExitDiagnostics};
  }
}

// Prints diagnostics; exits with 1 when any is an error.
void report(const std::string& where, const std::vector<Diagnostic>& diags, std::ostream& err) {
  for (const auto& d : diags) err << where << ':' << d << '\n';
  if (has_errors(diags)) throw Exit{kExitDiagnostics};
}

Inputs load_inputs(const Options& o, std::ostream& err, bool need_gestures) {
  Inputs in;
  in.cfg = load_config(o, err);
  in.kb = load_kb(o.kb, err);
  if (need_gestures) in.db = load_db(gestures_path(o), err);
  in.script = load_script(o.script, err);
  report(o.script, validate_script(in.script, in.kb, in.cfg), err);
  if (need_gestures) report(o.kb, check_kb_closure(in.kb, in.db, in.cfg.platform), err);
  return in;
}

Mode parse_mode(const std::string& s, std::ostream& err) {
  auto m = mode_from_string(s);
  if (!m) {
    err << "error: unknown mode '" << s
        << "' (expected coherent, incoherent_spatial or incoherent_gesture)\n";
    throw Exit{kExitUsage};
  }
  return *m;
}

Timeline plan(const Inputs& in, Mode mode, std::ostream& err, InterpretationTrace* trace) {
  try {
    return plan_performance(in.script, in.kb, in.db, in.cfg, mode, trace);
  } catch (const LegalityError& e) {
    err << "internal error: " << e.what() << '\n';
    throw Exit{kExitDiagnostics};
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    throw Exit{kExitDiagnostics};
  }
}

void emit(const Options& o, const std::string& text, std::ostream& out, std::ostream& err) {
  if (o.out.empty())
    out << text;
  else
    write_file(o.out, text, err);
}

int cmd_compile(const Options& o, std::ostream& out, std::ostream& err) {
  const Inputs in = load_inputs(o, err, true);
  InterpretationTrace trace;
  const Timeline tl = plan(in, o.mode.empty() ? Mode::coherent : parse_mode(o.mode, err), err,
                           &trace);
  for (const auto& w : tl.warnings) err << "warning: " << w << '\n';
  emit(o, dump_document(timeline_to_json(tl)), out, err);
  if (!o.emit_trace.empty()) write_file(o.emit_trace, dump_document(trace_to_json(trace)), err);
  return kExitOk;
}

int cmd_trace(const Options& o, std::ostream& out, std::ostream& err) {
  const Inputs in = load_inputs(o, err, false);
  emit(o, valence_csv(run_valence(in.script, in.kb, in.cfg)), out, err);
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  Timeline tl;
  const bool from_timeline = fs::path(o.script).extension() == ".json";
  RunOptions run;
  if (o.scheduling == "round_robin") run.scheduling = Scheduling::round_robin;
  else if (o.scheduling == "permuted") run.scheduling = Scheduling::permuted;
  else if (o.scheduling == "threaded") run.scheduling = Scheduling::threaded;
  else {
    err << "error: unknown scheduling '" << o.scheduling << "'\n";
    throw Exit{kExitUsage};
  }
  if (from_timeline) {
    const std::string text = read_file(o.script, err, "timeline");
    try {
      tl = timeline_from_json(nlohmann::json::parse(text));
    } catch (const std::exception& e) {
      err << o.script << ": error: " << e.what() << '\n';
      throw Exit{kExitDiagnostics};
    }
  } else {
    if (o.kb.empty()) {
      err << "error: --kb is required to simulate a script\n";
      throw Exit{kExitUsage};
    }
    const Inputs in = load_inputs(o, err, true);
    tl = plan(in, o.mode.empty() ? Mode::coherent : parse_mode(o.mode, err), err, nullptr);
    run.permutation_seed = in.cfg.rng_seed;
  }
  ExecutionTrace trace;
  try {
    trace = run_timeline(tl, run);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    throw Exit{kExitDiagnostics};
  }
  emit(o, trace.to_lines(), out, err);
  std::ostream& summary = o.out.empty() ? err : out;
  summary << "ticks " << trace.ticks_elapsed << '\n';
  for (const auto& p : trace.final_stage.poses) {
    summary << p.actor_id << " x=" << num(p.pose.x) << " y=" << num(p.pose.y)
            << " heading=" << num(p.pose.heading) << '\n';
  }
  summary << "distance " << num(tl.initial_stage.distance()) << " -> "
          << num(trace.final_stage.distance()) << '\n';
  if (!(trace.final_stage == tl.final_stage))
    summary << "warning: replay differs from the planned final stage\n";
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const EngineConfig cfg = load_config(o, err);
  bool errors = false;
  auto note = [&](const std::string& where, const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags) err << where << ':' << d << '\n';
    errors = errors || has_errors(diags);
  };
  const ActionKB kb = load_kb(o.kb, err);
  const std::string gpath = gestures_path(o);
  if (!o.gestures.empty() || fs::exists(gpath)) {
    const GestureDB db = load_db(gpath, err);
    note(o.kb, check_kb_closure(kb, db, cfg.platform));
    out << gpath << ": " << db.size() << " gestures\n";
  }
  out << o.kb << ": " << kb.size() << " actions\n";
  if (!o.matrix.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(o.matrix, err, "matrix"));
    } catch (const nlohmann::json::exception& e) {
      err << o.matrix << ": error: " << e.what() << '\n';
      throw Exit{kExitDiagnostics};
    }
    const auto problems = check_combination_matrix(j);
    for (const auto& p : problems) err << o.matrix << ": error: " << p << '\n';
    errors = errors || !problems.empty();
    if (problems.empty()) out << o.matrix << ": matches the built-in table\n";
  }
  if (!o.script.empty()) {
    const Script script = load_script(o.script, err);
    note(o.script, validate_script(script, kb, cfg));
    out << o.script << ": " << script.actions.size() << " actions\n";
  }
  return errors ? kExitDiagnostics : kExitOk;
}

int cmd_baseline(const Options& o, std::ostream& out, std::ostream& err) {
  const Mode mode = parse_mode(o.mode.empty() ? "incoherent_spatial" : o.mode, err);
  const Inputs in = load_inputs(o, err, true);
  const Timeline coherent = plan(in, Mode::coherent, err, nullptr);
  const Timeline other = plan(in, mode, err, nullptr);
  const auto diff = diff_timelines(coherent, other);
  if (!o.out.empty()) {
    std::error_code ec;
    fs::create_directories(o.out, ec);
    const fs::path dir(o.out);
    write_file((dir / "coherent.timeline.json").string(),
               dump_document(timeline_to_json(coherent)), err);
    write_file((dir / (std::string(to_string(mode)) + ".timeline.json")).string(),
               dump_document(timeline_to_json(other)), err);
    write_file((dir / "diff.json").string(), dump_document(diff_to_json(diff)), err);
  }
  out << "coherent vs " << to_string(mode) << ": " << diff.size() << " changed fields\n";
  for (const auto& d : diff) {
    out << "slot " << d.slot;
    if (!d.actor.empty()) out << ' ' << d.actor << " event " << d.event;
    out << ' ' << d.field << ": " << d.before << " -> " << d.after << '\n';
  }
  return kExitOk;
}

}  // namespace

std::string valence_csv(const ValenceRun& run) {
  std::ostringstream os;
  os << kTraceCsvHeader << '\n';
  for (const auto& s : run.steps) {
    for (const CharacterStep* c : {&s.agent, &s.patient}) {
      os << s.index << ',' << s.action_id << ',' << c->character_id << ',' << to_string(c->role)
         << ',' << num(c->valence) << ',' << num(c->prev_context) << ',' << num(c->context) << ','
         << num(c->delta.value) << ',' << to_string(c->delta.direction) << ','
         << to_string(s.connective) << '\n';
    }
  }
  return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compile two-character plot scripts into choreography timelines."};
  app.name("stagecraft");
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool script_required) {
    auto* s = sub->add_option("script", o.script, "plot script (.story)");
    if (script_required) s->required();
    sub->add_option("--config", o.config, "engine config JSON; flags override it");
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--beta", o.beta, "decay weight of the current action, 0 < beta < 1");
    sub->add_option("--tau", o.tau, "step threshold on |delta|");
  };
  auto pipeline = [&](CLI::App* sub) {
    common(sub, true);
    sub->add_option("--kb", o.kb, "action knowledge base JSON")->required();
    sub->add_option("--gestures", o.gestures, "gesture DB JSON (default: gestures.json beside the KB)");
    sub->add_option("--out", o.out, "output path (default: standard output)");
  };

  auto* compile = app.add_subcommand("compile", "write the timeline JSON for a script");
  pipeline(compile);
  compile->add_option("--mode", o.mode, "coherent, incoherent_spatial or incoherent_gesture");
  compile->add_option("--emit-trace", o.emit_trace, "also write the interpretation trace here");

  auto* trace = app.add_subcommand("trace", "per-step valence, context and delta as CSV");
  pipeline(trace);

  auto* simulate = app.add_subcommand("simulate", "replay a script or timeline on the blackboard");
  common(simulate, true);
  simulate->add_option("--kb", o.kb, "action knowledge base JSON");
  simulate->add_option("--gestures", o.gestures, "gesture DB JSON");
  simulate->add_option("--out", o.out, "trace output path (default: standard output)");
  simulate->add_option("--mode", o.mode, "experimental condition");
  simulate->add_option("--scheduling", o.scheduling, "round_robin, permuted or threaded");

  auto* validate = app.add_subcommand("validate", "check a KB, gesture DB, matrix and script");
  common(validate, false);
  validate->add_option("--kb", o.kb, "action knowledge base JSON")->required();
  validate->add_option("--gestures", o.gestures, "gesture DB JSON");
  validate->add_option("--matrix", o.matrix, "combination matrix JSON");

  auto* baseline = app.add_subcommand("baseline", "coherent timeline against an incoherent one");
  pipeline(baseline);
  baseline->add_option("--mode", o.mode, "incoherent_spatial (default) or incoherent_gesture");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*compile) return cmd_compile(o, out, err);
    if (*trace) return cmd_trace(o, out, err);
    if (*simulate) return cmd_simulate(o, out, err);
    if (*validate) return cmd_validate(o, out, err);
    if (*baseline) return cmd_baseline(o, out, err);
  } catch (const Exit& e) {
    return e.code;
  }
  return kExitUsage;
}

}  // namespace stagecraft
