#pragma once

#include <cmath>
#include <numbers>

namespace gradcur {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::remainder(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

// Absolute wrapped angular difference, in [0, pi].
inline double heading_distance(double a, double b) {
  return std::fabs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

}  // namespace gradcur
