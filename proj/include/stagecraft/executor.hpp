#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stagecraft/choreographer.hpp"
#include "stagecraft/knowledge_base.hpp"

namespace stagecraft {

inline constexpr double kTickSeconds = 0.1;

/// Whole ticks covering `seconds`, rounding up. Exact tenths stay exact.
std::int64_t ticks_for(double seconds);

enum class Phase { start, end };

std::string_view to_string(Phase p);

struct Post {
  std::int64_t tick = 0;
  std::string actor;
  std::size_t slot = 0;
  std::size_t event = 0;  // index within the actor's track
  std::string label;
  Phase phase = Phase::start;
  std::size_t arrival = 0;  // position in intake order; not part of the ordering key

  friend bool operator==(const Post&, const Post&) = default;
};

/// Ordering key: tick, actor, event index, start before end.
bool post_before(const Post& a, const Post& b);

class BarrierViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Append-only coordination medium shared by the actors. All mutations go
/// through one mutex, so actors may post from separate threads.
class Blackboard {
 public:
  /// Appends a post and returns its arrival index. Throws BarrierViolation
  /// for a post in slot i+1 while slot i is still held.
  std::size_t post(std::int64_t tick, std::string_view actor, std::size_t slot, std::size_t event,
                   std::string_view label, Phase phase);

  /// Opens the barrier after `slot` at `tick`.
  void release(std::size_t slot, std::int64_t tick);

  /// Number of slots whose barrier has been released.
  std::size_t released() const;

  std::vector<Post> posts() const;          // intake order
  std::vector<Post> ordered_posts() const;  // by ordering key
  std::vector<std::int64_t> release_ticks() const;

 private:
  mutable std::mutex mu_;
  std::vector<Post> posts_;
  std::vector<std::int64_t> release_ticks_;
};

struct ExecutionTrace {
  std::vector<Post> posts;  // ordered
  StageState final_stage;
  std::int64_t ticks_elapsed = 0;
  std::vector<std::int64_t> barrier_ticks;  // release tick of each slot

  /// One CSV line per post, header first.
  std::string to_lines() const;
};

enum class Scheduling {
  round_robin,  // actors step in declaration order every tick
  permuted,     // a fresh seeded order every tick
  threaded,     // one thread per actor, ticks joined by a barrier
};

struct RunOptions {
  Scheduling scheduling = Scheduling::round_robin;
  std::uint64_t permutation_seed = 0;
  const GestureDB* gestures = nullptr;  // when set, gesture ids are checked
  std::int64_t max_ticks = 1'000'000;   // barrier timeout
};

ExecutionTrace run_timeline(const Timeline& timeline, const RunOptions& options = {});

}  // namespace stagecraft
