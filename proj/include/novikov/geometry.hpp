#pragma once

#include <cmath>
#include <cstdint>
#include <compare>

namespace novikov {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  constexpr double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
  constexpr Vec2 perp() const { return {-y, x}; }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Vec2i {
  std::int64_t x = 0;
  std::int64_t y = 0;
  constexpr auto operator<=>(const Vec2i&) const = default;
  constexpr Vec2i operator+(Vec2i o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2i operator-(Vec2i o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2i operator-() const { return {-x, -y}; }
  constexpr bool zero() const { return x == 0 && y == 0; }
};

/// Counterclockwise rotation by alpha radians.
inline Vec2 rotate(Vec2 v, double alpha) {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Lexicographic order on (x, y) with an absolute tie tolerance.
inline bool lex_less(Vec2 a, Vec2 b, double eps = 1e-12) {
  if (a.x < b.x - eps) return true;
  if (a.x > b.x + eps) return false;
  return a.y < b.y - eps;
}

// Solve [u v] * (s, t) = w for (s, t); u, v must be linearly independent.
inline Vec2 solve2x2(Vec2 u, Vec2 v, Vec2 w) {
  const double det = u.cross(v);
  return {w.cross(v) / det, u.cross(w) / det};
}

}  // namespace novikov
