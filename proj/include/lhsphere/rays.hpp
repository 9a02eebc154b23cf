#pragma once

// Planar geometric optics around the unit circle (the sphere's great circle
// through the source) with signed refractive indices. Entering a medium of
// opposite sign puts the transmitted ray on the same side of the normal as
// the incident one. Amplitudes are not tracked.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "lhsphere/core.hpp"

namespace lhsphere::rays {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  friend Vec2 operator*(double s, Vec2 v) { return v * s; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) { return a * (1.0 / norm(a)); }
inline Vec2 rotated(Vec2 a, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

class Ray {
public:
  Ray(Vec2 origin, Vec2 direction) : origin_(origin), direction_(normalized(direction)) {
    if (!std::isfinite(direction_.x) || !std::isfinite(direction_.y)) {
      throw DomainError("Ray: direction must be a nonzero finite vector");
    }
  }
  Vec2 origin() const { return origin_; }
  Vec2 direction() const { return direction_; }

private:
  Vec2 origin_;
  Vec2 direction_;
};

/// n = sign·sqrt(Re ε · Re μ), negative for LH media.
class SignedIndex {
public:
  explicit SignedIndex(double value) : value_(value) {
    if (!(std::abs(value) > 0.0) || !std::isfinite(value)) throw DomainError("SignedIndex: must be finite and nonzero");
  }

  static SignedIndex of(const Medium& m) {
    const Handedness h = classify_handedness(m);
    if (h.classification == HandednessClass::Mixed) {
      throw DomainError("SignedIndex: a mixed-sign medium has no real refractive index");
    }
    const double magnitude = std::sqrt(m.epsilon().real() * m.mu().real());
    return SignedIndex(h.is_left() ? -magnitude : magnitude);
  }

  double value() const { return value_; }

private:
  double value_;
};

/// Signed Snell's law. `normal` is the unit normal on the incident side
/// (dir·normal < 0). Empty on total internal reflection.
inline std::optional<Vec2> refract(Vec2 dir, Vec2 normal, SignedIndex n_from, SignedIndex n_to) {
  const double cos_i = -dot(dir, normal);
  if (!(cos_i > 0.0)) throw DomainError("refract: direction must point against the normal");
  const double ratio = n_from.value() / n_to.value();
  const Vec2 tangential = dir + normal * cos_i;
  const double sin2_t = ratio * ratio * dot(tangential, tangential);
  if (sin2_t > 1.0) return std::nullopt;
  return normalized(tangential * ratio - normal * std::sqrt(1.0 - sin2_t));
}

inline Vec2 reflect(Vec2 dir, Vec2 normal) { return dir - normal * (2.0 * dot(dir, normal)); }

/// Signed sine of the angle between `dir` and the inward normal -normal.
inline double signed_sine(Vec2 dir, Vec2 normal) { return cross(-normal, dir); }

enum class Termination { Exited, MaxBounces, TotalInternalReflection };

inline std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::Exited: return "exited";
    case Termination::MaxBounces: return "max_bounces";
    case Termination::TotalInternalReflection: return "total_internal_reflection";
  }
  return "?";
}

struct InterfaceEvent {
  Vec2 point;
  double n_from;
  double n_to;
  double sin_incident;
  double sin_transmitted;  // NaN when reflected
  bool reflected;

  double snell_residual() const {
    return reflected ? 0.0 : std::abs(n_from * sin_incident - n_to * sin_transmitted);
  }
};

struct RayPath {
  double launch_angle = 0.0;  // relative to the source→centre direction
  std::vector<Vec2> vertices;
  std::vector<InterfaceEvent> events;
  Termination termination = Termination::Exited;

  /// First interior chord, if the ray entered the sphere.
  std::optional<std::pair<Vec2, Vec2>> interior_chord() const {
    if (events.empty() || events.front().reflected || vertices.size() < 3) return std::nullopt;
    return std::make_pair(vertices[1], vertices[2]);
  }
};

namespace detail {

// Smallest t > 0 with |p + t d| = 1, if any.
inline std::optional<double> hit_from_outside(Vec2 p, Vec2 d) {
  const double b = dot(p, d);
  const double c = dot(p, p) - 1.0;
  const double disc = b * b - c;
  if (disc <= 0.0) return std::nullopt;
  const double t = -b - std::sqrt(disc);
  if (t <= 0.0) return std::nullopt;
  return t;
}

inline Vec2 on_circle(Vec2 p) { return normalized(p); }

}  // namespace detail

/// Traces one ray from outside the unit circle through a sphere of index
/// n_in embedded in n_out. `max_bounces` caps internal reflections.
inline RayPath trace_ray(const Ray& ray, SignedIndex n_in, SignedIndex n_out, int max_bounces,
                         double exit_length = 3.0) {
  RayPath path;
  path.vertices.push_back(ray.origin());
  Vec2 dir = ray.direction();
  const auto t_hit = detail::hit_from_outside(ray.origin(), dir);
  if (!t_hit) {
    path.vertices.push_back(ray.origin() + dir * exit_length);
    return path;
  }
  Vec2 p = detail::on_circle(ray.origin() + dir * *t_hit);
  path.vertices.push_back(p);

  const auto entry = refract(dir, p, n_out, n_in);
  if (!entry) {
    path.events.push_back({p, n_out.value(), n_in.value(), signed_sine(dir, p),
                           std::numeric_limits<double>::quiet_NaN(), true});
    dir = reflect(dir, p);
    path.vertices.push_back(p + dir * exit_length);
    path.termination = Termination::TotalInternalReflection;
    return path;
  }
  path.events.push_back({p, n_out.value(), n_in.value(), signed_sine(dir, p), signed_sine(*entry, p), false});
  dir = *entry;

  for (int bounces = 0;;) {
    // chord to the far side of the unit circle
    p = detail::on_circle(p + dir * (-2.0 * dot(p, dir)));
    path.vertices.push_back(p);
    const Vec2 inner_normal = -p;  // faces the interior, where the ray comes from
    const auto out = refract(dir, inner_normal, n_in, n_out);
    if (out) {
      path.events.push_back(
          {p, n_in.value(), n_out.value(), signed_sine(dir, inner_normal), signed_sine(*out, inner_normal), false});
      path.vertices.push_back(p + *out * exit_length);
      path.termination = Termination::Exited;
      return path;
    }
    path.events.push_back({p, n_in.value(), n_out.value(), signed_sine(dir, inner_normal),
                           std::numeric_limits<double>::quiet_NaN(), true});
    if (bounces++ >= max_bounces) {
      path.termination = Termination::MaxBounces;
      return path;
    }
    dir = reflect(dir, inner_normal);
  }
}

/// fan_count rays spanning the angular sector the unit sphere subtends from
/// `source`, at the midpoints of fan_count equal sub-sectors (an odd count
/// includes the central ray). Exterior is vacuum.
inline std::vector<RayPath> trace_fan(Vec2 source, const Medium& interior, int fan_count, int max_bounces) {
  if (!(norm(source) > 1.0)) throw DomainError("trace_fan: source must lie outside the sphere");
  if (fan_count < 1) throw DomainError("trace_fan: fan_count must be >= 1");
  if (max_bounces < 0) throw DomainError("trace_fan: max_bounces must be >= 0");
  const SignedIndex n_in = SignedIndex::of(interior);
  const SignedIndex n_out{1.0};
  const Vec2 axis = normalized(-source);
  const double half = std::asin(1.0 / norm(source));
  std::vector<RayPath> paths;
  paths.reserve(static_cast<std::size_t>(fan_count));
  for (int i = 0; i < fan_count; ++i) {
    const double angle = -half + (i + 0.5) * 2.0 * half / fan_count;
    RayPath path = trace_ray(Ray{source, rotated(axis, angle)}, n_in, n_out, max_bounces, 2.0 * norm(source));
    path.launch_angle = angle;
    paths.push_back(std::move(path));
  }
  return paths;
}

/// Intersection of segments [a0,a1] and [b0,b1], if they cross.
inline std::optional<Vec2> segment_intersection(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const Vec2 r = a1 - a0;
  const Vec2 s = b1 - b0;
  const double denom = cross(r, s);
  if (denom == 0.0) return std::nullopt;
  const double t = cross(b0 - a0, s) / denom;
  const double u = cross(b0 - a0, r) / denom;
  if (t <= 0.0 || t >= 1.0 || u <= 0.0 || u >= 1.0) return std::nullopt;
  return a0 + r * t;
}

/// Crossing points of the first interior chords of neighbouring rays.
inline std::vector<Vec2> interior_crossings(const std::vector<RayPath>& fan) {
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i + 1 < fan.size(); ++i) {
    const auto a = fan[i].interior_chord();
    const auto b = fan[i + 1].interior_chord();
    if (!a || !b) continue;
    if (auto x = segment_intersection(a->first, a->second, b->first, b->second); x && norm(*x) < 1.0) {
      pts.push_back(*x);
    }
  }
  return pts;
}

/// Focusing metric: RMS distance of the neighbouring-chord crossing points
/// from their centroid. A bundle whose chords never cross inside the sphere
/// (a defocusing sphere) scores +inf; smaller is tighter focusing.
inline double crossing_spread(const std::vector<RayPath>& fan) {
  const auto pts = interior_crossings(fan);
  if (pts.empty()) return std::numeric_limits<double>::infinity();
  Vec2 c{};
  for (const Vec2& p : pts) c = c + p;
  c = c * (1.0 / static_cast<double>(pts.size()));
  double acc = 0.0;
  for (const Vec2& p : pts) acc += dot(p - c, p - c);
  return std::sqrt(acc / static_cast<double>(pts.size()));
}

/// Largest Snell residual over every transmitting vertex of a fan.
inline double max_snell_residual(const std::vector<RayPath>& fan) {
  double worst = 0.0;
  for (const auto& path : fan) {
    for (const auto& e : path.events) worst = std::max(worst, e.snell_residual());
  }
  return worst;
}

}  // namespace lhsphere::rays
