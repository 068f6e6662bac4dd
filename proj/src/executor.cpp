#include "stagecraft/executor.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "stagecraft/rng.hpp"

namespace stagecraft {

std::int64_t ticks_for(double seconds) {
  if (!(seconds > 0.0)) return 0;
  return static_cast<std::int64_t>(std::ceil(seconds / kTickSeconds - 1e-9));
}

std::string_view to_string(Phase p) { return p == Phase::start ? "start" : "end"; }

bool post_before(const Post& a, const Post& b) {
  if (a.tick != b.tick) return a.tick < b.tick;
  if (a.actor != b.actor) return a.actor < b.actor;
  if (a.event != b.event) return a.event < b.event;
  return a.phase == Phase::start && b.phase == Phase::end;
}

std::size_t Blackboard::post(std::int64_t tick, std::string_view actor, std::size_t slot,
                             std::size_t event, std::string_view label, Phase phase) {
  std::lock_guard lock(mu_);
  if (slot > release_ticks_.size()) {
    throw BarrierViolation(std::string(actor) + " posted for slot " + std::to_string(slot) +
                           " before slot " + std::to_string(slot - 1) + " was released");
  }
  if (slot < release_ticks_.size()) {
    throw BarrierViolation(std::string(actor) + " posted for slot " + std::to_string(slot) +
                           " after its barrier was released");
  }
  const std::size_t arrival = posts_.size();
  posts_.push_back({tick, std::string(actor), slot, event, std::string(label), phase, arrival});
  return arrival;
}

void Blackboard::release(std::size_t slot, std::int64_t tick) {
  std::lock_guard lock(mu_);
  if (slot != release_ticks_.size())
    throw BarrierViolation("slot " + std::to_string(slot) + " released out of order");
  release_ticks_.push_back(tick);
}

std::size_t Blackboard::released() const {
  std::lock_guard lock(mu_);
  return release_ticks_.size();
}

std::vector<Post> Blackboard::posts() const {
  std::lock_guard lock(mu_);
  return posts_;
}

std::vector<Post> Blackboard::ordered_posts() const {
  std::vector<Post> out = posts();
  std::sort(out.begin(), out.end(), post_before);
  return out;
}

std::vector<std::int64_t> Blackboard::release_ticks() const {
  std::lock_guard lock(mu_);
  return release_ticks_;
}

std::string ExecutionTrace::to_lines() const {
  std::ostringstream os;
  os << "tick,actor,slot,event,phase\n";
  for (const auto& p : posts) {
    os << p.tick << ',' << p.actor << ',' << p.slot << ',' << p.event << ':' << p.label << ','
       << to_string(p.phase) << '\n';
  }
  return os.str();
}

namespace {

struct Scheduled {
  std::size_t event = 0;
  std::string label;
  std::int64_t start = 0;  // ticks from slot base
  std::int64_t end = 0;
  std::optional<Transform> transform;
};

struct ActorAgent {
  std::string id;
  Pose pose;
  std::vector<std::vector<Scheduled>> slots;
  std::vector<std::int64_t> slot_end;
  bool arrived = false;

  void step(std::int64_t tick, std::int64_t base, std::size_t slot, Blackboard& bb,
            const StageBounds& bounds) {
    if (arrived) return;
    for (const auto& e : slots[slot]) {
      if (base + e.start == tick) bb.post(tick, id, slot, e.event, e.label, Phase::start);
      if (base + e.end == tick) {
        bb.post(tick, id, slot, e.event, e.label, Phase::end);
        if (e.transform) pose = apply_transform(pose, *e.transform, bounds);
      }
    }
    if (tick >= base + slot_end[slot]) arrived = true;
  }
};

// Clock and barrier bookkeeping shared by every scheduling strategy.
struct Director {
  std::vector<ActorAgent>& actors;
  Blackboard& bb;
  std::size_t slot_count;
  std::int64_t max_ticks;
  std::int64_t tick = 0;
  std::int64_t base = 0;
  std::size_t slot = 0;

  bool finished() const { return slot >= slot_count; }

  void end_tick() {
    const bool all = std::all_of(actors.begin(), actors.end(),
                                 [](const ActorAgent& a) { return a.arrived; });
    if (all) {
      bb.release(slot, tick);
      ++slot;
      base = tick + 1;
      for (auto& a : actors) a.arrived = false;
    }
    ++tick;
    if (!finished() && tick > max_ticks) throw BarrierViolation("barrier timeout");
  }
};

std::vector<ActorAgent> build_agents(const Timeline& tl) {
  std::vector<ActorAgent> agents;
  for (const auto& p : tl.initial_stage.poses) {
    ActorAgent a;
    a.id = p.actor_id;
    a.pose = p.pose;
    for (const auto& s : tl.slots) {
      std::vector<Scheduled> events;
      std::int64_t last = 0;
      for (const auto& t : s.tracks) {
        if (t.actor_id != a.id) continue;
        for (std::size_t i = 0; i < t.events.size(); ++i) {
          const auto& e = t.events[i];
          Scheduled sc;
          sc.event = i;
          sc.label = e.label();
          sc.start = ticks_for(e.onset_s);
          sc.end = sc.start + std::max<std::int64_t>(1, ticks_for(e.duration_s));
          sc.transform = e.transform;
          last = std::max(last, sc.end);
          events.push_back(std::move(sc));
        }
      }
      a.slots.push_back(std::move(events));
      a.slot_end.push_back(last);
    }
    agents.push_back(std::move(a));
  }
  return agents;
}

void run_sequential(Director& d, const StageBounds& bounds, const RunOptions& options) {
  SeededStream rng(options.permutation_seed);
  std::vector<std::size_t> order(d.actors.size());
  while (!d.finished()) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (options.scheduling == Scheduling::permuted) {
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    }
    for (auto i : order) d.actors[i].step(d.tick, d.base, d.slot, d.bb, bounds);
    d.end_tick();
  }
}

void run_threaded(Director& d, const StageBounds& bounds) {
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::atomic<bool> stop = d.finished();
  auto record = [&](std::exception_ptr e) {
    std::lock_guard lock(failure_mu);
    if (!failure) failure = e;
  };
  auto on_tick = [&]() noexcept {
    try {
      if (!failure) d.end_tick();
    } catch (...) {
      record(std::current_exception());
    }
    if (d.finished() || failure) stop = true;
  };
  std::barrier sync(static_cast<std::ptrdiff_t>(d.actors.size()), on_tick);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < d.actors.size(); ++i) {
    threads.emplace_back([&, i] {
      while (!stop) {
        try {
          d.actors[i].step(d.tick, d.base, d.slot, d.bb, bounds);
        } catch (...) {
          record(std::current_exception());
        }
        sync.arrive_and_wait();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

ExecutionTrace run_timeline(const Timeline& timeline, const RunOptions& options) {
  if (options.gestures != nullptr) {
    for (const auto& s : timeline.slots) {
      for (const auto& t : s.tracks) {
        for (const auto& e : t.events) {
          if (e.gesture_id && options.gestures->find(*e.gesture_id) == nullptr)
            throw KbError("slot " + std::to_string(s.index) + ": event references unknown gesture '" +
                          *e.gesture_id + "'");
        }
      }
    }
  }
  std::vector<ActorAgent> agents = build_agents(timeline);
  Blackboard bb;
  Director director{agents, bb, timeline.slots.size(), options.max_ticks};
  const StageBounds bounds = stage_bounds(timeline.config);
  if (options.scheduling == Scheduling::threaded && !agents.empty())
    run_threaded(director, bounds);
  else
    run_sequential(director, bounds, options);

  ExecutionTrace trace;
  trace.posts = bb.ordered_posts();
  for (auto& p : trace.posts) p.arrival = 0;  // intake order is scheduling noise
  trace.barrier_ticks = bb.release_ticks();
  trace.ticks_elapsed = trace.barrier_ticks.empty() ? 0 : trace.barrier_ticks.back();
  trace.final_stage = timeline.initial_stage;
  for (const auto& a : agents) trace.final_stage.pose(a.id) = a.pose;
  return trace;
}

}  // namespace stagecraft
