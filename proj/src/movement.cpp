#include "stagecraft/movement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stagecraft {

namespace {

constexpr Legality C = Legality::combinable;
constexpr Legality R = Legality::restricted;
constexpr Legality X = Legality::exclusive;

// Rows and columns in kAllMovementKinds order:
// spatial, rotational, iconic, deictic, metaphoric, cohesive, beat.
constexpr Legality kCombination[7][7] = {
    {C, C, R, R, R, C, C},
    {C, C, R, R, R, C, C},
    {R, R, C, C, X, C, X},
    {R, R, C, C, C, C, X},
    {R, R, X, C, C, C, X},
    {C, C, C, C, C, C, X},
    {C, C, X, X, X, X, C},
};

constexpr std::size_t idx(MovementKind k) { return static_cast<std::size_t>(k); }

}  // namespace

std::string_view to_string(MovementKind k) {
  switch (k) {
    case MovementKind::spatial: return "spatial";
    case MovementKind::rotational: return "rotational";
    case MovementKind::iconic: return "iconic";
    case MovementKind::deictic: return "deictic";
    case MovementKind::metaphoric: return "metaphoric";
    case MovementKind::cohesive: return "cohesive";
    case MovementKind::beat: return "beat";
  }
  return "?";
}

std::optional<MovementKind> movement_kind_from_string(std::string_view s) {
  for (auto k : kAllMovementKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::vector<std::string> MovementProperties::names() const {
  static constexpr std::pair<MovementProperty, const char*> kNames[] = {
      {MovementProperty::global, "global"},         {MovementProperty::relational, "relational"},
      {MovementProperty::summative, "summative"},   {MovementProperty::additive, "additive"},
      {MovementProperty::persistent, "persistent"}, {MovementProperty::obvious, "obvious"},
      {MovementProperty::local, "local"},           {MovementProperty::referential, "referential"},
      {MovementProperty::metaphorical, "metaphorical"}};
  std::vector<std::string> out;
  for (const auto& [p, name] : kNames) {
    if (has(p)) out.emplace_back(name);
  }
  return out;
}

MovementProperties properties_of(MovementKind kind) {
  using P = MovementProperty;
  switch (kind) {
    case MovementKind::spatial:
      return {P::global, P::relational, P::summative, P::additive, P::persistent};
    case MovementKind::rotational:
      return {P::relational, P::obvious, P::summative, P::additive, P::persistent};
    case MovementKind::iconic: return {P::obvious};
    case MovementKind::deictic: return {P::referential};
    case MovementKind::metaphoric: return {P::metaphorical};
    case MovementKind::cohesive: return {P::global};
    case MovementKind::beat: return {P::local};
  }
  return {};
}

std::string_view to_string(Legality l) {
  switch (l) {
    case Legality::combinable: return "comb.";
    case Legality::restricted: return "restr.";
    case Legality::exclusive: return "excl.";
  }
  return "?";
}

std::optional<Legality> legality_from_string(std::string_view s) {
  if (s == "comb." || s == "combinable") return Legality::combinable;
  if (s == "restr." || s == "restricted") return Legality::restricted;
  if (s == "excl." || s == "exclusive") return Legality::exclusive;
  return std::nullopt;
}

Legality can_combine(MovementKind a, MovementKind b) { return kCombination[idx(a)][idx(b)]; }

std::string_view to_string(Condition c) {
  return c == Condition::walk_safe ? "walk_safe" : "target_still_visible";
}

std::optional<Condition> condition_from_string(std::string_view s) {
  if (s == "walk_safe") return Condition::walk_safe;
  if (s == "target_still_visible") return Condition::target_still_visible;
  return std::nullopt;
}

std::optional<Condition> restriction_condition(MovementKind a, MovementKind b) {
  if (can_combine(a, b) != Legality::restricted) return std::nullopt;
  MovementKind gesture = is_body_movement(a) ? b : a;
  if (gesture == MovementKind::deictic) return Condition::target_still_visible;
  return Condition::walk_safe;
}

Verdict validate_parallel_set(std::span<const MovementKind> events, bool restricted_ok) {
  Verdict v;
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      Legality l = can_combine(events[i], events[j]);
      if (l == Legality::exclusive || (l == Legality::restricted && !restricted_ok)) {
        v.accepted = false;
        v.offending.push_back({events[i], events[j], l});
      }
    }
  }
  return v;
}

double normalize_heading(double radians) {
  double h = std::fmod(radians, kTwoPi);
  if (h < 0.0) h += kTwoPi;
  if (h >= kTwoPi) h = 0.0;  // fmod rounding can land exactly on 2pi
  return h;
}

double shortest_rotation(double from, double to) {
  double d = std::remainder(to - from, kTwoPi);  // [-pi, pi]
  if (d <= -kPi) d += kTwoPi;
  return d;
}

bool StageBounds::contains(double x, double y) const {
  constexpr double eps = 1e-12;
  return std::abs(x) <= half_width + eps && std::abs(y) <= half_depth + eps;
}

Eigen::Vector2d heading_unit(double heading) {
  const double h = normalize_heading(heading);
  constexpr double snap = 1e-12;
  if (std::abs(h) < snap || std::abs(h - kTwoPi) < snap) return {1.0, 0.0};
  if (std::abs(h - kPi / 2) < snap) return {0.0, 1.0};
  if (std::abs(h - kPi) < snap) return {-1.0, 0.0};
  if (std::abs(h - 3 * kPi / 2) < snap) return {0.0, -1.0};
  return {std::cos(h), std::sin(h)};
}

Pose translate_pose(const Pose& p, double omega) {
  const Eigen::Vector2d u = heading_unit(p.heading);
  return {p.x + omega * u.x(), p.y + omega * u.y(), p.heading};
}

double clamp_translation(const Pose& p, double requested, const StageBounds& bounds) {
  const Eigen::Vector2d u = heading_unit(p.heading) * (requested < 0.0 ? -1.0 : 1.0);
  double limit = std::abs(requested);
  auto bound_axis = [&](double pos, double dir, double half) {
    if (dir > 0.0) limit = std::min(limit, std::max(0.0, (half - pos) / dir));
    if (dir < 0.0) limit = std::min(limit, std::max(0.0, (-half - pos) / dir));
  };
  bound_axis(p.x, u.x(), bounds.half_width);
  bound_axis(p.y, u.y(), bounds.half_depth);
  return requested < 0.0 ? -limit : limit;
}

Pose translate_pose(const Pose& p, double omega, const StageBounds& bounds,
                    std::vector<std::string>* warnings) {
  Pose out = translate_pose(p, omega);
  if (bounds.contains(out.x, out.y)) return out;
  double clamped = clamp_translation(p, omega, bounds);
  if (warnings != nullptr) {
    std::ostringstream os;
    os << "translation of " << omega << " m leaves the stage; clamped to " << clamped << " m";
    warnings->push_back(os.str());
  }
  out = translate_pose(p, clamped);
  out.x = std::clamp(out.x, -bounds.half_width, bounds.half_width);
  out.y = std::clamp(out.y, -bounds.half_depth, bounds.half_depth);
  return out;
}

Pose rotate_pose(const Pose& p, double theta) {
  return {p.x, p.y, normalize_heading(p.heading + theta)};
}

Pose apply_transform(const Pose& p, const Transform& t, const StageBounds& bounds,
                     std::vector<std::string>* warnings) {
  if (const auto* tr = std::get_if<Translation>(&t))
    return translate_pose(p, tr->omega, bounds, warnings);
  return rotate_pose(p, std::get<Rotation>(t).theta);
}

Eigen::Matrix3d rotation_matrix(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix3d m;
  m << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return m;
}

Eigen::Matrix3d translation_matrix(double omega) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 2) = omega;
  return m;
}

Eigen::Matrix4d spatial_matrix(double omega) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 3) = omega;
  return m;
}

Eigen::Matrix3d pose_matrix(const Pose& p) {
  Eigen::Matrix3d m = rotation_matrix(p.heading);
  m(0, 2) = p.x;
  m(1, 2) = p.y;
  return m;
}

Pose pose_from_matrix(const Eigen::Matrix3d& m) {
  return {m(0, 2), m(1, 2), normalize_heading(std::atan2(m(1, 0), m(0, 0)))};
}

}  // namespace stagecraft
