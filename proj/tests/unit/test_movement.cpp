#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "stagecraft/movement.hpp"
#include "stagecraft/timeline_json.hpp"
#include "support.hpp"

using namespace stagecraft;

namespace {

// Hand transcription of the combination table, row by row in the
// order spatial, rotational, iconic, deictic, metaphoric, cohesive, beat.
const char* const kTable[7][7] = {
    {"comb.", "comb.", "restr.", "restr.", "restr.", "comb.", "comb."},
    {"comb.", "comb.", "restr.", "restr.", "restr.", "comb.", "comb."},
    {"restr.", "restr.", "comb.", "comb.", "excl.", "comb.", "excl."},
    {"restr.", "restr.", "comb.", "comb.", "comb.", "comb.", "excl."},
    {"restr.", "restr.", "excl.", "comb.", "comb.", "comb.", "excl."},
    {"comb.", "comb.", "comb.", "comb.", "comb.", "comb.", "excl."},
    {"comb.", "comb.", "excl.", "excl.", "excl.", "excl.", "comb."},
};

Pose random_pose(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> xy(-1.5, 1.5);
  std::uniform_real_distribution<double> h(0.0, kTwoPi);
  return {xy(gen), xy(gen), normalize_heading(h(gen))};
}

}  // namespace

TEST_CASE("combination matrix matches the transcription") {
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 7; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      CHECK(to_string(can_combine(kAllMovementKinds[i], kAllMovementKinds[j])) == kTable[i][j]);
    }
  }
}

TEST_CASE("shipped matrix file matches the transcription") {
  auto j = nlohmann::json::parse(testing::slurp(testing::data_path("combination_matrix.json")));
  REQUIRE(j["rows"].size() == 7);
  for (std::size_t r = 0; r < 7; ++r) {
    CHECK(j["kinds"][r] == to_string(kAllMovementKinds[r]));
    for (std::size_t c = 0; c < 7; ++c) CHECK(j["rows"][r][c] == kTable[r][c]);
  }
  CHECK(check_combination_matrix(j).empty());
  j["rows"][2][4] = "comb.";
  CHECK(check_combination_matrix(j).size() == 1);
}

TEST_CASE("matrix is symmetric with a combinable diagonal") {
  for (auto a : kAllMovementKinds) {
    CHECK(can_combine(a, a) == Legality::combinable);
    for (auto b : kAllMovementKinds) CHECK(can_combine(a, b) == can_combine(b, a));
  }
  CHECK(can_combine(MovementKind::spatial, MovementKind::spatial) == Legality::combinable);
  CHECK(can_combine(MovementKind::iconic, MovementKind::metaphoric) == Legality::exclusive);
  CHECK(can_combine(MovementKind::beat, MovementKind::cohesive) == Legality::exclusive);
  CHECK(can_combine(MovementKind::beat, MovementKind::spatial) == Legality::combinable);
}

TEST_CASE("restricted pairs name their condition") {
  for (auto a : kAllMovementKinds) {
    for (auto b : kAllMovementKinds) {
      auto c = restriction_condition(a, b);
      CHECK(c.has_value() == (can_combine(a, b) == Legality::restricted));
    }
  }
  CHECK(restriction_condition(MovementKind::spatial, MovementKind::deictic) ==
        Condition::target_still_visible);
  CHECK(restriction_condition(MovementKind::metaphoric, MovementKind::rotational) ==
        Condition::walk_safe);
  CHECK(restriction_condition(MovementKind::spatial, MovementKind::iconic) == Condition::walk_safe);
}

TEST_CASE("parallel set validation") {
  using K = MovementKind;
  CHECK(validate_parallel_set(std::vector<K>{}, false).accepted);
  CHECK(validate_parallel_set(std::vector<K>{K::iconic}, false).accepted);
  CHECK(validate_parallel_set(std::vector<K>{K::spatial, K::cohesive}, false).accepted);
  Verdict v = validate_parallel_set(std::vector<K>{K::spatial, K::deictic}, false);
  CHECK_FALSE(v.accepted);
  REQUIRE(v.offending.size() == 1);
  CHECK(v.offending[0].legality == Legality::restricted);
  CHECK(validate_parallel_set(std::vector<K>{K::spatial, K::deictic}, true).accepted);
  Verdict x = validate_parallel_set(std::vector<K>{K::iconic, K::metaphoric, K::beat}, true);
  CHECK_FALSE(x.accepted);
  CHECK(x.offending.size() == 3);
}

TEST_CASE("movement properties") {
  using P = MovementProperty;
  CHECK(properties_of(MovementKind::spatial) ==
        MovementProperties{P::global, P::relational, P::summative, P::additive, P::persistent});
  CHECK(properties_of(MovementKind::rotational) ==
        MovementProperties{P::relational, P::obvious, P::summative, P::additive, P::persistent});
  CHECK(properties_of(MovementKind::iconic) == MovementProperties{P::obvious});
  CHECK(properties_of(MovementKind::deictic) == MovementProperties{P::referential});
  CHECK(properties_of(MovementKind::metaphoric) == MovementProperties{P::metaphorical});
  CHECK(properties_of(MovementKind::cohesive) == MovementProperties{P::global});
  CHECK(properties_of(MovementKind::beat) == MovementProperties{P::local});
  CHECK(properties_of(MovementKind::beat).names() == std::vector<std::string>{"local"});
}

TEST_CASE("pose transform examples") {
  CHECK(translate_pose({0, 0, 0}, 1.0) == Pose{1, 0, 0});
  CHECK(translate_pose({0, 0, kPi / 2}, 2.0) == Pose{0, 2, kPi / 2});
  Pose p{0.3, -0.2, 1.1};
  CHECK(rotate_pose(rotate_pose(p, 0.7), -0.7).heading == doctest::Approx(p.heading));
  CHECK(rotate_pose(p, kTwoPi).heading == doctest::Approx(p.heading));
  CHECK(normalize_heading(-kPi / 2) == doctest::Approx(3 * kPi / 2));
  CHECK(shortest_rotation(0.0, kPi) == doctest::Approx(kPi));
  CHECK(shortest_rotation(kPi, 0.0) == doctest::Approx(kPi));
  CHECK(shortest_rotation(0.1, kTwoPi - 0.1) == doctest::Approx(-0.2));
}

TEST_CASE("forward, turn, return composition is exact") {
  const StageBounds b;
  Pose p{0, 0, 0};
  for (const Transform& t : {Transform{Translation{1.0}}, Transform{Rotation{kPi}},
                             Transform{Translation{1.0}}}) {
    p = apply_transform(p, t, b);
  }
  CHECK(std::abs(p.x) <= 1e-12);
  CHECK(std::abs(p.y) <= 1e-12);
  CHECK(std::abs(p.heading - kPi) <= 1e-12);
}

TEST_CASE("stage bounds clamp with a warning") {
  const StageBounds b{2.0, 1.5};
  std::vector<std::string> warnings;
  Pose p = translate_pose({1.8, 0, 0}, 0.5, b, &warnings);
  CHECK(p.x == doctest::Approx(2.0));
  CHECK(warnings.size() == 1);
  CHECK(clamp_translation({1.8, 0, 0}, 0.5, b) == doctest::Approx(0.2));
  CHECK(clamp_translation({1.8, 0, 0}, -0.5, b) == doctest::Approx(-0.5));
  CHECK(translate_pose({0, 0, 0}, 0.5, b, &warnings) == Pose{0.5, 0, 0});
  CHECK(warnings.size() == 1);
}

TEST_CASE("rotation matrices are proper and invert") {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> ang(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double t = ang(gen);
    const Eigen::Matrix3d r = rotation_matrix(t);
    REQUIRE(r.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE((r * rotation_matrix(-t) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
    // Independent oracle for the entries.
    REQUIRE(r(0, 0) == doctest::Approx(std::cos(t)));
    REQUIRE(r(0, 1) == doctest::Approx(-std::sin(t)));
  }
}

TEST_CASE("homogeneous translation equals the vector form") {
  std::mt19937_64 gen(43);
  std::uniform_real_distribution<double> om(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Pose p = random_pose(gen);
    const double w = om(gen);
    const Pose v = translate_pose(p, w);
    const Pose m = pose_from_matrix(pose_matrix(p) * translation_matrix(w));
    REQUIRE(std::abs(m.x - v.x) <= 1e-9);
    REQUIRE(std::abs(m.y - v.y) <= 1e-9);
    REQUIRE(std::abs(shortest_rotation(m.heading, v.heading)) <= 1e-9);
  }
  // The printed row-vector matrix is the transpose of the internal one.
  const Eigen::Matrix4d s = spatial_matrix(0.4);
  CHECK(s(0, 3) == 0.4);
  CHECK(s.transpose()(3, 0) == 0.4);
  CHECK(s.block<3, 3>(0, 0) == Eigen::Matrix3d::Identity());
}

TEST_CASE("translations are additive") {
  std::mt19937_64 gen(47);
  std::uniform_real_distribution<double> om(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Pose p = random_pose(gen);
    const double a = om(gen), b = om(gen);
    const Pose two = translate_pose(translate_pose(p, a), b);
    const Pose one = translate_pose(p, a + b);
    REQUIRE(std::abs(two.x - one.x) <= 1e-12);
    REQUIRE(std::abs(two.y - one.y) <= 1e-12);
    REQUIRE(two.heading == one.heading);
  }
}

TEST_CASE("position is the sum of world-frame steps") {
  std::mt19937_64 gen(53);
  std::uniform_real_distribution<double> om(-0.5, 0.5);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    Pose p{0.1, -0.3, 0.5};
    double sx = p.x, sy = p.y, heading = p.heading;
    for (int k = 0; k < 30; ++k) {
      if (coin(gen)) {
        const double w = om(gen);
        sx += w * std::cos(heading);
        sy += w * std::sin(heading);
        p = translate_pose(p, w);
      } else {
        const double t = ang(gen);
        heading += t;
        p = rotate_pose(p, t);
      }
    }
    CHECK(std::abs(p.x - sx) <= 1e-9);
    CHECK(std::abs(p.y - sy) <= 1e-9);
  }
}
