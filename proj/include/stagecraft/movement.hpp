#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace stagecraft {

enum class MovementKind { spatial, rotational, iconic, deictic, metaphoric, cohesive, beat };

inline constexpr std::array<MovementKind, 7> kAllMovementKinds = {
    MovementKind::spatial,  MovementKind::rotational, MovementKind::iconic, MovementKind::deictic,
    MovementKind::metaphoric, MovementKind::cohesive, MovementKind::beat};

std::string_view to_string(MovementKind k);
std::optional<MovementKind> movement_kind_from_string(std::string_view s);

inline bool is_body_movement(MovementKind k) {
  return k == MovementKind::spatial || k == MovementKind::rotational;
}

enum class MovementProperty : std::uint16_t {
  global = 1u << 0,
  relational = 1u << 1,
  summative = 1u << 2,
  additive = 1u << 3,
  persistent = 1u << 4,
  obvious = 1u << 5,
  local = 1u << 6,
  referential = 1u << 7,
  metaphorical = 1u << 8,
};

/// Small bit set of MovementProperty flags.
class MovementProperties {
 public:
  constexpr MovementProperties() = default;
  constexpr MovementProperties(std::initializer_list<MovementProperty> props) {
    for (auto p : props) bits_ |= static_cast<std::uint16_t>(p);
  }

  constexpr bool has(MovementProperty p) const {
    return (bits_ & static_cast<std::uint16_t>(p)) != 0;
  }
  constexpr std::uint16_t bits() const { return bits_; }
  std::vector<std::string> names() const;

  friend constexpr bool operator==(MovementProperties, MovementProperties) = default;

 private:
  std::uint16_t bits_ = 0;
};

MovementProperties properties_of(MovementKind kind);

enum class Legality { combinable, restricted, exclusive };

std::string_view to_string(Legality l);
std::optional<Legality> legality_from_string(std::string_view s);

/// Lookup in the 7x7 combination matrix.
Legality can_combine(MovementKind a, MovementKind b);

/// Named precondition that makes a restricted pair acceptable.
enum class Condition { walk_safe, target_still_visible };

std::string_view to_string(Condition c);
std::optional<Condition> condition_from_string(std::string_view s);

/// The condition a caller must assert for a restricted pair; nullopt when the
/// pair is not restricted.
std::optional<Condition> restriction_condition(MovementKind a, MovementKind b);

struct OffendingPair {
  MovementKind a;
  MovementKind b;
  Legality legality;
};

struct Verdict {
  bool accepted = true;
  std::vector<OffendingPair> offending;
};

/// Checks a set of simultaneously active movements. Exclusive pairs always
/// reject; restricted pairs reject unless `restricted_ok`.
Verdict validate_parallel_set(std::span<const MovementKind> events, bool restricted_ok);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

double normalize_heading(double radians);

/// Minimal signed angle taking `from` to `to`, in (-pi, pi].
double shortest_rotation(double from, double to);

/// Planar actor state.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, [0, 2pi)

  friend bool operator==(const Pose&, const Pose&) = default;
};

struct Translation {
  double omega = 0.0;  // meters along the current heading

  friend bool operator==(const Translation&, const Translation&) = default;
};

struct Rotation {
  double theta = 0.0;  // radians, counter-clockwise

  friend bool operator==(const Rotation&, const Rotation&) = default;
};

using Transform = std::variant<Translation, Rotation>;

/// Axis-aligned rectangle centred on the origin.
struct StageBounds {
  double half_width = 2.0;
  double half_depth = 1.5;

  bool contains(double x, double y) const;
};

/// Unit vector of a heading. Headings on the four axes give exact components
/// so motion along an axis never leaves it.
Eigen::Vector2d heading_unit(double heading);

Pose translate_pose(const Pose& p, double omega);

/// Bounded variant: a translation leaving the stage stops at the boundary and
/// appends a warning when `warnings` is given.
Pose translate_pose(const Pose& p, double omega, const StageBounds& bounds,
                    std::vector<std::string>* warnings = nullptr);

/// Largest |omega| <= |requested| keeping the actor on stage, with the sign of
/// `requested`.
double clamp_translation(const Pose& p, double requested, const StageBounds& bounds);

Pose rotate_pose(const Pose& p, double theta);

Pose apply_transform(const Pose& p, const Transform& t, const StageBounds& bounds,
                     std::vector<std::string>* warnings = nullptr);

// Homogeneous matrices in column-vector convention (translation in the last
// column). The printed row-vector forms are their transposes.

/// Planar rotation about z, 3x3.
Eigen::Matrix3d rotation_matrix(double theta);

/// Planar translation along the local x axis, 3x3.
Eigen::Matrix3d translation_matrix(double omega);

/// Spatial movement along x as a 4x4 homogeneous matrix.
Eigen::Matrix4d spatial_matrix(double omega);

/// World-from-actor matrix of a pose.
Eigen::Matrix3d pose_matrix(const Pose& p);

Pose pose_from_matrix(const Eigen::Matrix3d& m);

}  // namespace stagecraft
