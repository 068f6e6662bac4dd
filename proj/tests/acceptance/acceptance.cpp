// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stagecraft/choreographer.hpp"
#include "stagecraft/executor.hpp"
#include "stagecraft/knowledge_base.hpp"
#include "stagecraft/script.hpp"
#include "stagecraft/timeline_json.hpp"
#include "stagecraft/valence.hpp"

using namespace stagecraft;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string data_path(const std::string& rel) {
  return std::string(STAGECRAFT_DATA_DIR) + "/" + rel;
}

const ActionKB& kb() {
  static const ActionKB k = load_action_kb(slurp(data_path("kb.json")));
  return k;
}

const GestureDB& db() {
  static const GestureDB d = load_gesture_db(slurp(data_path("gestures.json")));
  return d;
}

Script fixture(const std::string& name) {
  return parse_script(slurp(data_path("scripts/" + name + ".story")));
}

const std::vector<std::string> kFixtures = {"scenario1", "scenario2", "scenario3", "unroll",
                                            "neutral",   "irony",     "disagreement"};

Script random_script(std::mt19937_64& gen, std::size_t max_len) {
  const auto& actions = kb().actions();
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::ostringstream os;
  os << "characters: A=Alice, B=Bob\n";
  const std::size_t n = len(gen);
  for (std::size_t i = 0; i < n; ++i) {
    const bool a_first = coin(gen) == 0;
    os << (a_first ? "A " : "B ") << actions[pick(gen)].action_id << (a_first ? " B\n" : " A\n");
  }
  return parse_script(os.str());
}

EngineConfig seeded(std::uint64_t seed) {
  EngineConfig cfg;
  cfg.rng_seed = seed;
  return cfg;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const std::string& name, double budget_s,
               const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(3);
  const bool in_time = budget_s <= 0.0 || secs < budget_s;
  const bool pass = o.pass && in_time;
  line << (pass ? "PASS" : "FAIL") << ' ' << id << ' ' << name << ": " << o.detail << " ["
       << secs << " s";
  if (budget_s > 0.0) line << " < " << budget_s << " s";
  line << ']';
  std::cout << line.str() << std::endl;
  if (!pass) ++failures;
}

// Hand transcription of the combination table.
const char* const kTable[7][7] = {
    {"comb.", "comb.", "restr.", "restr.", "restr.", "comb.", "comb."},
    {"comb.", "comb.", "restr.", "restr.", "restr.", "comb.", "comb."},
    {"restr.", "restr.", "comb.", "comb.", "excl.", "comb.", "excl."},
    {"restr.", "restr.", "comb.", "comb.", "comb.", "comb.", "excl."},
    {"restr.", "restr.", "excl.", "comb.", "comb.", "comb.", "excl."},
    {"comb.", "comb.", "comb.", "comb.", "comb.", "comb.", "excl."},
    {"comb.", "comb.", "excl.", "excl.", "excl.", "excl.", "comb."},
};

std::size_t kind_index(MovementKind k) {
  for (std::size_t i = 0; i < kAllMovementKinds.size(); ++i) {
    if (kAllMovementKinds[i] == k) return i;
  }
  throw std::logic_error("unknown kind");
}

// Exact fraction for the hand unroll.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t n, std::int64_t d) {
    if (d < 0) n = -n, d = -d;
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    return {n / g, d / g};
  }
  Rational operator+(Rational o) const { return make(num * o.den + o.num * den, den * o.den); }
  Rational operator-(Rational o) const { return make(num * o.den - o.num * den, den * o.den); }
  Rational operator*(Rational o) const { return make(num * o.num, den * o.den); }
  bool operator==(const Rational&) const = default;
  double value() const { return double(num) / double(den); }
};

Outcome c1_table() {
  int exact = 0, symmetric = 0;
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 7; ++j) {
      const auto a = kAllMovementKinds[i], b = kAllMovementKinds[j];
      if (to_string(can_combine(a, b)) == kTable[i][j]) ++exact;
      if (can_combine(a, b) == can_combine(b, a)) ++symmetric;
    }
  }
  return {exact == 49 && symmetric == 49, std::to_string(exact) + "/49 entries match, " +
                                              std::to_string(symmetric) + "/49 symmetric"};
}

Outcome c2_recurrence() {
  std::mt19937_64 gen(20);
  std::uniform_int_distribution<int> len(1, 10), val(-12, 12), pick(0, 3);
  const double betas[] = {0.3, 0.5, 0.6, 0.9};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double beta = betas[pick(gen)];
    std::vector<double> v(len(gen));
    for (auto& x : v) x = val(gen);
    ValenceState s{"A", 0.0, {}};
    for (double x : v) s = update_context(std::move(s), x, beta);
    double closed = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k)
      closed += beta * std::pow(1.0 - beta, double(v.size() - 1 - k)) * v[k];
    worst = std::max(worst, std::abs(s.context - closed));
  }
  std::ostringstream d;
  d << "1000 sequences, max |recurrence - closed form| = " << worst << " (tol 1e-9)";
  return {worst <= 1e-9, d.str()};
}

Outcome c3_unroll() {
  EngineConfig cfg;
  cfg.decay_weight = 0.6;
  const ValenceRun run = run_valence(fixture("unroll"), kb(), cfg);
  const auto& h = run.states[0].history;
  if (h.size() != 3) return {false, "expected three updates for A"};
  const Rational beta{3, 5}, keep{2, 5};
  const std::int64_t vs[] = {8, 8, -8};
  Rational c{0, 1}, prev{0, 1};
  std::vector<Rational> ctx;
  for (auto v : vs) {
    prev = c;
    c = beta * Rational{v, 1} + keep * c;
    ctx.push_back(c);
  }
  const Rational delta3 = c - prev;
  bool ok = ctx[0] == Rational{24, 5} && ctx[1] == Rational{168, 25} &&
            ctx[2] == Rational{-264, 125} && delta3 == Rational{-1104, 125};
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    ok = ok && h[i].valence == double(vs[i]);
    worst = std::max(worst, std::abs(h[i].context - ctx[i].value()));
  }
  worst = std::max(worst, std::abs(h[2].delta - delta3.value()));
  std::ostringstream d;
  d << "contexts [" << h[0].context << ", " << h[1].context << ", " << h[2].context
    << "], delta3 = " << h[2].delta << ", max error vs exact fractions " << worst
    << " (tol 1e-12)";
  return {ok && worst <= 1e-12, d.str()};
}

Outcome c4_scenarios() {
  std::vector<std::string> problems;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) problems.push_back(what);
  };
  {
    InterpretationTrace tr;
    Timeline tl = plan_performance(fixture("scenario1"), kb(), db(), seeded(7), Mode::coherent, &tr);
    const RoleTrace& p = tr.steps.at(2).patient;
    expect(tr.steps[2].action_id == "insult", "scenario 1 slot 2 is not the insult");
    expect(p.construal.kind == ConstrualKind::metaphoric &&
               p.construal.enacted_action_id == "attack",
           "insult not construed as attack");
    expect(p.construal.spoken_action_id == "insult", "insult dialogue switched");
    expect(p.delta.direction == Direction::away, "patient delta is not away");
    bool stepped = false;
    for (const auto& e : tl.slots[2].track(p.character_id).events) {
      if (e.kind == MovementKind::spatial && e.transform)
        stepped = std::get<Translation>(*e.transform).omega < 0.0;  // A faces B: away is backward
    }
    expect(stepped, "no away-step for the insulted patient");
  }
  {
    InterpretationTrace tr;
    plan_performance(fixture("scenario2"), kb(), db(), seeded(7), Mode::coherent, &tr);
    const RoleTrace& a = tr.steps.at(1).agent;
    expect(tr.steps[1].action_id == "praise", "scenario 2 slot 1 is not the praise");
    expect(a.construal.kind == ConstrualKind::metaphoric &&
               a.construal.enacted_action_id == "worship",
           "praise not construed as worship");
    expect(a.gesture_id == "bow_deep", "worship did not select the bow");
  }
  {
    InterpretationTrace tr;
    plan_performance(fixture("scenario3"), kb(), db(), seeded(7), Mode::coherent, &tr);
    const std::pair<std::string, std::string> want[] = {
        {"scold", "whip"}, {"command", "enslave"}, {"fire", "release"}};
    for (const auto& [src, target] : want) {
      bool found = false;
      for (const auto& s : tr.steps) {
        if (s.action_id != src) continue;
        found = true;
        const Construal& c = s.patient.construal;
        expect(c.kind == ConstrualKind::metaphoric && c.enacted_action_id == target &&
                   c.link && c.link->mode == LinkMode::reinforce,
               src + " not reinforced into " + target);
      }
      expect(found, src + " missing from scenario 3");
    }
  }
  std::string detail = problems.empty() ? "insult->attack with away-step, praise->worship (bow_deep), "
                                          "scold/command/fire->whip/enslave/release"
                                        : problems.front();
  return {problems.empty(), detail};
}

Outcome c5_transforms() {
  std::mt19937_64 gen(55);
  std::uniform_real_distribution<double> ang(-10.0, 10.0), om(-1.0, 1.0), xy(-1.5, 1.5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t = ang(gen);
    const Eigen::Matrix3d r = rotation_matrix(t);
    worst = std::max(worst, std::abs(r.determinant() - 1.0));
    worst = std::max(worst,
                     (r * rotation_matrix(-t) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
    const Pose p{xy(gen), xy(gen), normalize_heading(ang(gen))};
    const double a = om(gen), b = om(gen);
    const Pose two = translate_pose(translate_pose(p, a), b);
    const Pose one = translate_pose(p, a + b);
    worst = std::max({worst, std::abs(two.x - one.x), std::abs(two.y - one.y)});
  }
  Pose q{0, 0, 0};
  const StageBounds bounds;
  for (const Transform& tf : {Transform{Translation{1.0}}, Transform{Rotation{kPi}},
                              Transform{Translation{1.0}}})
    q = apply_transform(q, tf, bounds);
  const double fig = std::max({std::abs(q.x), std::abs(q.y), std::abs(q.heading - kPi)});
  std::ostringstream d;
  d << "1000 cases max error " << worst << " (tol 1e-9); forward-turn-forward ends at ("
    << q.x << ", " << q.y << ", " << q.heading << "), error " << fig << " (tol 1e-12)";
  return {worst <= 1e-9 && fig <= 1e-12, d.str()};
}

// Independent overlap scan against the transcribed table.
int illegal_overlaps(const Timeline& tl) {
  int bad = 0;
  for (const auto& s : tl.slots) {
    for (const auto& t : s.tracks) {
      for (std::size_t i = 0; i < t.events.size(); ++i) {
        for (std::size_t j = i + 1; j < t.events.size(); ++j) {
          const auto& x = t.events[i];
          const auto& y = t.events[j];
          if (!(x.onset_s < y.end_s() && y.onset_s < x.end_s())) continue;
          const std::string cell = kTable[kind_index(x.kind)][kind_index(y.kind)];
          if (cell == "excl.") {
            ++bad;
          } else if (cell == "restr.") {
            const auto& body = is_body_movement(x.kind) ? x : y;
            const auto& gest = is_body_movement(x.kind) ? y : x;
            const Condition need = gest.kind == MovementKind::deictic
                                       ? Condition::target_still_visible
                                       : Condition::walk_safe;
            const bool named = std::find(body.conditions.begin(), body.conditions.end(), need) !=
                               body.conditions.end();
            const bool safe = need != Condition::walk_safe ||
                              db().at(*gest.gesture_id).has(GestureFlag::walk_safe);
            if (!named || !safe) ++bad;
          }
        }
      }
    }
  }
  return bad;
}

Outcome c6_legality() {
  std::mt19937_64 gen(6);
  int bad = 0, checker = 0, mismatched = 0, restricted_seen = 0;
  for (int i = 0; i < 100; ++i) {
    const Script s = random_script(gen, 12);
    const EngineConfig cfg = seeded(600 + i);
    const Timeline a = plan_performance(s, kb(), db(), cfg, Mode::coherent);
    const Timeline b = plan_performance(s, kb(), db(), cfg, Mode::coherent);
    bad += illegal_overlaps(a);
    checker += int(check_timeline_legality(a, db()).size());
    if (dump_document(timeline_to_json(a)) != dump_document(timeline_to_json(b))) ++mismatched;
    for (const auto& sl : a.slots) {
      for (const auto& t : sl.tracks) {
        for (const auto& e : t.events) restricted_seen += e.conditions.empty() ? 0 : 1;
      }
    }
  }
  std::ostringstream d;
  d << "100 scripts: " << bad << " illegal overlaps, " << checker << " checker findings, "
    << mismatched << " non-identical re-runs, " << restricted_seen
    << " events carrying restriction conditions";
  return {bad == 0 && checker == 0 && mismatched == 0, d.str()};
}

Outcome c7_flip() {
  std::vector<Script> scripts;
  for (const auto& f : kFixtures) scripts.push_back(fixture(f));
  std::mt19937_64 gen(7);
  for (int i = 0; i < 40; ++i) scripts.push_back(random_script(gen, 12));
  int flips = 0, other = 0;
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    const EngineConfig cfg = seeded(i);
    const Timeline c = plan_performance(scripts[i], kb(), db(), cfg, Mode::coherent);
    const Timeline x = plan_performance(scripts[i], kb(), db(), cfg, Mode::incoherent_spatial);
    for (const auto& d : diff_timelines(c, x)) {
      const bool spatial = d.field == "transform" && d.before_value && d.after_value &&
                           c.slots[d.slot].track(d.actor).events[d.event].kind ==
                               MovementKind::spatial &&
                           *d.after_value == -*d.before_value;
      spatial ? ++flips : ++other;
    }
  }
  std::ostringstream d;
  d << scripts.size() << " scripts: " << flips << " sign-flipped steps, " << other
    << " other differences";
  return {other == 0 && flips > 0, d.str()};
}

Outcome c8_executor() {
  std::mt19937_64 gen(8);
  int trace_mismatch = 0, pose_mismatch = 0, barrier_breaks = 0, count_mismatch = 0;
  for (int i = 0; i < 50; ++i) {
    const Script s = random_script(gen, 10);
    const Timeline tl = plan_performance(s, kb(), db(), seeded(800 + i),
                                         i % 2 ? Mode::incoherent_spatial : Mode::coherent);
    const ExecutionTrace ref = run_timeline(tl, {Scheduling::round_robin, 0, &db()});
    std::size_t events = 0;
    for (const auto& sl : tl.slots) {
      for (const auto& t : sl.tracks) events += t.events.size();
    }
    if (ref.posts.size() != 2 * events) ++count_mismatch;
    if (!(ref.final_stage == tl.final_stage)) ++pose_mismatch;
    for (std::size_t k = 0; k + 1 < tl.slots.size(); ++k) {
      std::int64_t last = -1, first = INT64_MAX;
      for (const auto& p : ref.posts) {
        if (p.slot == k) last = std::max(last, p.tick);
        if (p.slot == k + 1) first = std::min(first, p.tick);
      }
      if (first != INT64_MAX && !(last < first)) ++barrier_breaks;
    }
    for (std::uint64_t perm = 0; perm < 10; ++perm) {
      const RunOptions opt{perm == 9 ? Scheduling::threaded : Scheduling::permuted, perm, &db()};
      const ExecutionTrace alt = run_timeline(tl, opt);
      if (!(alt.posts == ref.posts) || alt.barrier_ticks != ref.barrier_ticks) ++trace_mismatch;
      if (!(alt.final_stage == tl.final_stage)) ++pose_mismatch;
    }
  }
  std::ostringstream d;
  d << "50 timelines x 10 schedules: " << trace_mismatch << " trace mismatches, "
    << pose_mismatch << " pose mismatches, " << barrier_breaks << " barrier breaches, "
    << count_mismatch << " post-count errors";
  return {trace_mismatch + pose_mismatch + barrier_breaks + count_mismatch == 0, d.str()};
}

Outcome c9_arousal() {
  std::vector<ActionEntry> calm_actions = kb().actions();
  for (auto& a : calm_actions) a.arousal_A = a.arousal_B = 0;
  const ActionKB calm(calm_actions, kb().cohesive_pool(), kb().beat_pool());
  int valence_diffs = 0;
  for (const auto& f : kFixtures) {
    const Script s = fixture(f);
    const ValenceRun x = run_valence(s, kb(), {});
    const ValenceRun y = run_valence(s, calm, {});
    for (std::size_t i = 0; i < x.steps.size(); ++i) {
      const auto& a = x.steps[i];
      const auto& b = y.steps[i];
      for (const auto* pair : {&a.agent, &a.patient}) {
        const CharacterStep& q = pair == &a.agent ? b.agent : b.patient;
        if (pair->context != q.context || pair->delta.value != q.delta.value ||
            pair->delta.direction != q.delta.direction || pair->connective != q.connective)
          ++valence_diffs;
      }
      if (a.connective != b.connective) ++valence_diffs;
    }
  }
  // The scold agent has a sweeping medium candidate; find a seed where calm
  // selection departs from it.
  const Script s3 = fixture("scenario3");
  std::int64_t seed_found = -1;
  std::string change;
  for (std::uint64_t seed = 0; seed < 64 && seed_found < 0; ++seed) {
    InterpretationTrace hot, cool;
    plan_performance(s3, kb(), db(), seeded(seed), Mode::coherent, &hot);
    plan_performance(s3, calm, db(), seeded(seed), Mode::coherent, &cool);
    for (std::size_t i = 0; i < hot.steps.size(); ++i) {
      if (hot.steps[i].agent.gesture_id != cool.steps[i].agent.gesture_id) {
        seed_found = std::int64_t(seed);
        change = hot.steps[i].action_id + " agent " + hot.steps[i].agent.gesture_id + " -> " +
                 cool.steps[i].agent.gesture_id;
        break;
      }
    }
  }
  std::ostringstream d;
  d << kFixtures.size() << " fixtures: " << valence_diffs << " context/delta/connective changes; ";
  if (seed_found >= 0)
    d << "seed " << seed_found << " changes " << change;
  else
    d << "no gesture change found in 64 seeds";
  return {valence_diffs == 0 && seed_found >= 0, d.str()};
}

}  // namespace

int main() {
  std::cout.setf(std::ios::fmtflags(0), std::ios::floatfield);
  criterion(1, "combination-table conformance", 1.0, c1_table);
  criterion(2, "recurrence closed-form oracle", 5.0, c2_recurrence);
  criterion(3, "hand-unrolled three-step context", 0.0, c3_unroll);
  criterion(4, "scenario reproductions", 0.0, c4_scenarios);
  criterion(5, "transform properties", 0.0, c5_transforms);
  criterion(6, "timeline legality and determinism", 30.0, c6_legality);
  criterion(7, "coherence flip", 0.0, c7_flip);
  criterion(8, "executor barrier and interleaving independence", 0.0, c8_executor);
  criterion(9, "arousal isolation", 0.0, c9_arousal);
  std::cout << (failures == 0 ? "ALL PASS" : "FAILURES: " + std::to_string(failures)) << std::endl;
  return failures == 0 ? 0 : 1;
}
