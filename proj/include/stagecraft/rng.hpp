#pragma once

#include <cstdint>
#include <random>

namespace stagecraft {

/// The single seeded stream a run draws from. Draws are reduced to ranges by
/// rejection sampling rather than std distributions, whose output is not
/// pinned across standard library implementations.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() {
    ++draws_;
    return engine_();
  }

  /// Uniform integer in [0, n). Counts as one draw however many raw words the
  /// rejection loop consumes.
  std::uint64_t below(std::uint64_t n) {
    ++draws_;
    if (n <= 1) {
      engine_();
      return 0;
    }
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace stagecraft
