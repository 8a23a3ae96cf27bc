#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace lab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2 operator-() const { return {-x, -y}; }

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  // z-component of the wedge product; |cross| is the parallelogram area.
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct IVec2 {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend bool operator==(IVec2 a, IVec2 b) { return a.x == b.x && a.y == b.y; }
  friend bool operator<(IVec2 a, IVec2 b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  }
};

// Axis-aligned box given by center and positive half-widths.
struct Box {
  Vec2 center;
  Vec2 halfwidth{1.0, 1.0};

  Box() = default;
  Box(Vec2 c, Vec2 hw) : center(c), halfwidth(hw) {}

  double xmin() const { return center.x - halfwidth.x; }
  double xmax() const { return center.x + halfwidth.x; }
  double ymin() const { return center.y - halfwidth.y; }
  double ymax() const { return center.y + halfwidth.y; }

  bool contains(Vec2 p) const {
    return p.x >= xmin() && p.x <= xmax() && p.y >= ymin() && p.y <= ymax();
  }
  // Whether the closed ball B(c,r) lies inside the box.
  bool contains_ball(Vec2 c, double r) const {
    return c.x - r >= xmin() && c.x + r <= xmax() && c.y - r >= ymin() &&
           c.y + r <= ymax();
  }
  Box shrunk(double margin) const {
    return Box(center, {halfwidth.x - margin, halfwidth.y - margin});
  }
  bool valid() const { return halfwidth.x > 0 && halfwidth.y > 0; }

  static Box ball_bounding(Vec2 c, double r) { return Box(c, {r, r}); }
};

}  // namespace lab
