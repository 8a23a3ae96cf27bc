#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lab/geometry.hpp"

namespace lab {

// A finite window of an infinite planar configuration. The window box is a
// completeness guarantee: every point of the underlying infinite
// configuration that lies inside `window` is present in `points`.
struct PointSet {
  std::vector<Vec2> points;
  std::vector<double> weights;  // per-point coefficients, default 1
  Box window;
  std::string label;
  // Exact integer coordinates, present when the generator is integer-valued
  // (subsets of Z^2). Used by the grid-flow module.
  std::optional<std::vector<IVec2>> ipoints;

  std::size_t size() const { return points.size(); }
};

enum class NamedKind { Z, N, Z2, Z2_minus_Z, Z2_minus_N, Z2_minus_A };

// All points of Zu + Zv inside `window`. With `normalize`, (u,v) is first
// rescaled so |u ^ v| = 1.
PointSet gen_bravais(Vec2 u, Vec2 v, const Box& window, bool normalize = false);

// Named configurations; Z and N live on the horizontal axis as (k,0).
// A is required (and must be a subset of Z^2) only for Z2_minus_A.
PointSet gen_named(NamedKind kind, const Box& window,
                   const PointSet* A = nullptr);

// For k = 1..k_max, floor(32*pi*m*k + k^eps) points equally spaced on the
// circle of radius 4k. Window is the bounding box of B(0, 4*k_max); rings
// beyond k_max that cut the box corners are emitted clipped so the window
// stays complete.
PointSet gen_ring_counterexample(double m, double eps, int k_max);

// Exact count of points with |p - x| <= R (closed ball). Throws if the ball
// is not contained in the window.
long long count_in_ball(const PointSet& P, Vec2 x, double R);

// Exact minimum pairwise distance via a spatial-hash neighborhood scan.
double min_separation(const PointSet& P);

// Integer coordinates of P; validates exactness (|coord - round| < 1e-9).
std::vector<IVec2> as_integer_points(const PointSet& P);

// Uniform-grid index over a point set for repeated ball-count queries.
class PointIndex {
 public:
  explicit PointIndex(const PointSet& P, double cell = 0.0);
  long long count_in_ball(Vec2 x, double R) const;
  // Indices of points with |p - x| <= R appended to `out`.
  void gather(Vec2 x, double R, std::vector<std::uint32_t>& out) const;
  const PointSet& points() const { return *ps_; }

 private:
  const PointSet* ps_;
  double cell_;
  double x0_, y0_;
  int nx_, ny_;
  std::vector<std::uint32_t> cell_start_;
  std::vector<std::uint32_t> order_;
  int cell_of_x(double x) const;
  int cell_of_y(double y) const;
};

}  // namespace lab
