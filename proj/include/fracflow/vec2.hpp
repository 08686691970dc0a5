#pragma once

#include <cmath>

namespace fracflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) noexcept {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double a) noexcept {
    x *= a;
    y *= a;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) noexcept { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double a, Vec2 v) noexcept { return {a * v.x, a * v.y}; }
  friend constexpr Vec2 operator*(Vec2 v, double a) noexcept { return {a * v.x, a * v.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
/// z-component of the 3D cross product.
constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
/// Counter-clockwise quarter turn.
constexpr Vec2 perp(Vec2 a) noexcept { return {-a.y, a.x}; }
inline Vec2 normalized(Vec2 a) noexcept { return (1.0 / norm(a)) * a; }

}  // namespace fracflow
