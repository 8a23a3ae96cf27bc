#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lab/pointset.hpp"

namespace lab {

// Exact arithmetic in Z[phi] (phi^2 = phi + 1), enough headroom for the
// density recurrences at the order used here.
struct GoldenInt {
  __int128 a = 0;  // a + b*phi
  __int128 b = 0;

  GoldenInt() = default;
  GoldenInt(long long a_, long long b_) : a(a_), b(b_) {}

  GoldenInt operator+(GoldenInt o) const { return make(a + o.a, b + o.b); }
  GoldenInt operator-(GoldenInt o) const { return make(a - o.a, b - o.b); }
  GoldenInt operator*(GoldenInt o) const {
    // (a + b phi)(c + d phi) = ac + bd + (ad + bc + bd) phi
    return make(a * o.a + b * o.b, a * o.b + b * o.a + b * o.b);
  }
  bool is_zero() const { return a == 0 && b == 0; }
  double value() const;

 private:
  static GoldenInt make(__int128 a_, __int128 b_) {
    GoldenInt g;
    g.a = a_;
    g.b = b_;
    return g;
  }
};

// Exact fraction of two GoldenInt values.
struct GoldenFrac {
  GoldenInt num;
  GoldenInt den{1, 0};

  GoldenFrac operator-(const GoldenFrac& o) const {
    return {num * o.den - o.num * den, den * o.den};
  }
  GoldenFrac operator/(const GoldenFrac& o) const {
    return {num * o.den, den * o.num};
  }
  double value() const { return num.value() / den.value(); }
};

enum class TriangleKind { type1, type2 };  // sides (1,1,phi) and (phi,phi,1)

struct RobinsonTriangle {
  TriangleKind kind = TriangleKind::type1;
  // v[0] is the apex (between the two equal sides), v[1], v[2] the base.
  std::array<Vec2, 3> v;
  int generation = 0;

  double area() const;
  Vec2 barycentric(const std::array<double, 3>& b) const {
    return v[0] * b[0] + v[1] * b[1] + v[2] * b[2];
  }
};

struct Tiling {
  std::vector<RobinsonTriangle> triangles;
  std::array<double, 3> p1_bary{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::array<double, 3> p2_bary{1.0 / 3, 1.0 / 3, 1.0 / 3};
  int generation = 0;

  double total_area() const;
};

inline constexpr double kGoldenRatio = 1.6180339887498948482;

// Areas of the two prototiles (Heron).
double area_type1();
double area_type2();

// Single type1 triangle at generation 0 (apex at the origin).
Tiling seed_tiling();

// Scale by phi about the origin and substitute: type1 -> {type1, type2},
// type2 -> {type1, 2 x type2}. Exact vertex maps; generation increments.
Tiling inflate(const Tiling& t);

// Distinguished points of every leaf after n inflations of the type1 seed.
// Anchors are barycentric and must be strictly interior.
PointSet penrose_points(int n, const std::array<double, 3>& p1_bary,
                        const std::array<double, 3>& p2_bary);
PointSet penrose_points(int n);

// (u_{2n}, u_{2n+1}): number of type1/type2 leaves after n inflations,
// by the exact recurrence; cross-checked against the closed form.
std::pair<std::int64_t, std::int64_t> tile_counts(int n);

struct Densities {
  double m_n = 0.0;
  double q_n = 0.0;
  double m_limit = 0.0;
};
Densities densities(int n);

// Exact ratio (m_{n+1} - m) / (m_n - m) evaluated in Z[phi].
double density_ratio_exact(int n);
// Exact m_n - m_{n-1} and m_n - q_{n-1} (in units of 1/|Omega_1|).
GoldenFrac density_step_m(int n);
GoldenFrac density_step_q(int n);

struct DecayRow {
  int n = 0;
  double rhs_norm = 0.0;   // max(|m_n - m_{n-1}|, |m_n - q_{n-1}|), exact
  double grad_norm = 0.0;  // sup |grad U_n| from the Neumann Poisson solve
};

// For n = 1..n_max: the exact density mismatch norms and the measured
// sup-gradient of the zero-Neumann Poisson correction on the rasterized
// inflated triangle. grid_h is relative to the domain scale (mesh step =
// grid_h * phi^n), keeping the relative staircase error stable across n.
std::vector<DecayRow> correction_decay(int n_max, double grid_h);

}  // namespace lab
