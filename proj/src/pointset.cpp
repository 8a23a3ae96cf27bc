#include "lab/pointset.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "lab/errors.hpp"
#include "lab/numerics.hpp"

namespace lab {

namespace {

void finalize_weights(PointSet& P) {
  if (P.weights.empty()) P.weights.assign(P.points.size(), 1.0);
}

}  // namespace

PointSet gen_bravais(Vec2 u, Vec2 v, const Box& window, bool normalize) {
  double det = u.cross(v);
  if (det == 0.0 || !std::isfinite(det))
    throw validation_error("gen_bravais: degenerate basis (|u ^ v| = 0)");
  if (!window.valid()) throw validation_error("gen_bravais: invalid window");
  if (normalize) {
    double s = 1.0 / std::sqrt(std::abs(det));
    u = u * s;
    v = v * s;
    det = u.cross(v);
  }

  PointSet P;
  P.window = window;
  P.label = "bravais";

  // Integer ranges: a = x . u* etc. with (u*, v*) the dual basis; the window
  // corners bound the (a,b) preimage polygon.
  Vec2 ustar{v.y / det, -v.x / det};
  Vec2 vstar{-u.y / det, u.x / det};
  double amin = std::numeric_limits<double>::infinity(), amax = -amin;
  double bmin = amin, bmax = -amin;
  for (double cx : {window.xmin(), window.xmax()})
    for (double cy : {window.ymin(), window.ymax()}) {
      Vec2 c{cx, cy};
      double a = c.dot(ustar), b = c.dot(vstar);
      amin = std::min(amin, a);
      amax = std::max(amax, a);
      bmin = std::min(bmin, b);
      bmax = std::max(bmax, b);
    }
  long long a0 = static_cast<long long>(std::floor(amin)) - 1;
  long long a1 = static_cast<long long>(std::ceil(amax)) + 1;
  long long b0 = static_cast<long long>(std::floor(bmin)) - 1;
  long long b1 = static_cast<long long>(std::ceil(bmax)) + 1;

  for (long long a = a0; a <= a1; ++a)
    for (long long b = b0; b <= b1; ++b) {
      Vec2 p = u * static_cast<double>(a) + v * static_cast<double>(b);
      if (window.contains(p)) P.points.push_back(p);
    }
  finalize_weights(P);
  return P;
}

namespace {

PointSet integer_config(const Box& window, const std::string& label,
                        const std::function<bool(long long, long long)>& keep) {
  PointSet P;
  P.window = window;
  P.label = label;
  P.ipoints.emplace();
  long long x0 = static_cast<long long>(std::ceil(window.xmin()));
  long long x1 = static_cast<long long>(std::floor(window.xmax()));
  long long y0 = static_cast<long long>(std::ceil(window.ymin()));
  long long y1 = static_cast<long long>(std::floor(window.ymax()));
  for (long long x = x0; x <= x1; ++x)
    for (long long y = y0; y <= y1; ++y)
      if (keep(x, y)) {
        P.points.push_back({static_cast<double>(x), static_cast<double>(y)});
        P.ipoints->push_back({x, y});
      }
  P.weights.assign(P.points.size(), 1.0);
  return P;
}

}  // namespace

PointSet gen_named(NamedKind kind, const Box& window, const PointSet* A) {
  if (!window.valid()) throw validation_error("gen_named: invalid window");
  switch (kind) {
    case NamedKind::Z:
      return integer_config(window, "Z",
                            [](long long, long long y) { return y == 0; });
    case NamedKind::N:
      return integer_config(
          window, "N", [](long long x, long long y) { return y == 0 && x >= 0; });
    case NamedKind::Z2:
      return integer_config(window, "Z2",
                            [](long long, long long) { return true; });
    case NamedKind::Z2_minus_Z:
      return integer_config(window, "Z2_minus_Z",
                            [](long long, long long y) { return y != 0; });
    case NamedKind::Z2_minus_N:
      return integer_config(window, "Z2_minus_N", [](long long x, long long y) {
        return !(y == 0 && x >= 0);
      });
    case NamedKind::Z2_minus_A: {
      if (A == nullptr)
        throw validation_error("gen_named: Z2_minus_A requires A");
      std::vector<IVec2> removed = as_integer_points(*A);
      std::sort(removed.begin(), removed.end());
      return integer_config(window, "Z2_minus_A", [&](long long x, long long y) {
        return !std::binary_search(removed.begin(), removed.end(), IVec2{x, y});
      });
    }
  }
  throw validation_error("gen_named: unknown kind");
}

PointSet gen_ring_counterexample(double m, double eps, int k_max) {
  if (m < 0) throw validation_error("gen_ring_counterexample: m must be >= 0");
  if (!(eps > 0.0 && eps < 0.5))
    throw validation_error("gen_ring_counterexample: eps must be in (0, 1/2)");
  if (k_max < 1) throw validation_error("gen_ring_counterexample: k_max >= 1");

  const double L = 4.0 * k_max;
  PointSet P;
  P.window = Box({0, 0}, {L, L});
  P.label = "ring_counterexample";

  // Rings up to k_max lie fully inside the box; rings up to sqrt(2)*k_max cut
  // the corners and are clipped to the box to keep the window complete.
  int k_hi = static_cast<int>(std::ceil(std::sqrt(2.0) * k_max)) + 1;
  for (int k = 1; k <= k_hi; ++k) {
    double r = 4.0 * k;
    long long cnt = static_cast<long long>(
        std::floor(32.0 * kPi * m * k + std::pow(static_cast<double>(k), eps)));
    if (cnt <= 0) continue;
    for (long long i = 0; i < cnt; ++i) {
      double theta = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(cnt);
      Vec2 p{r * std::cos(theta), r * std::sin(theta)};
      if (k <= k_max || P.window.contains(p)) P.points.push_back(p);
    }
  }
  finalize_weights(P);
  return P;
}

long long count_in_ball(const PointSet& P, Vec2 x, double R) {
  if (R < 0) throw validation_error("count_in_ball: negative radius");
  if (!P.window.contains_ball(x, R))
    throw validation_error("count_in_ball: ball exits the window");
  const double R2 = R * R;
  long long n = 0;
  for (const Vec2& p : P.points)
    if ((p - x).norm2() <= R2) ++n;
  return n;
}

double min_separation(const PointSet& P) {
  const std::size_t n = P.points.size();
  if (n < 2) throw validation_error("min_separation: need at least 2 points");

  // Start from an average-density cell size; if the scan finds nothing within
  // one cell ring, grow the cell and retry. Once best <= cell the scan is
  // exhaustive for that distance.
  double wx = P.window.xmax() - P.window.xmin();
  double wy = P.window.ymax() - P.window.ymin();
  double cell = std::max(std::sqrt(wx * wy / static_cast<double>(n)), 1e-12);

  for (int attempt = 0; attempt < 64; ++attempt) {
    PointIndex idx(P, cell);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> buf;
    for (std::size_t i = 0; i < n; ++i) {
      buf.clear();
      idx.gather(P.points[i], cell, buf);
      for (std::uint32_t j : buf) {
        if (j == i) continue;
        double d = (P.points[i] - P.points[j]).norm();
        if (d > 0 && d < best) best = d;
      }
    }
    if (best <= cell) return best;
    cell *= 2.0;
  }
  // Degenerate layouts (e.g. 2 points far apart): fall back to all pairs.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      best = std::min(best, (P.points[i] - P.points[j]).norm());
  return best;
}

std::vector<IVec2> as_integer_points(const PointSet& P) {
  if (P.ipoints) return *P.ipoints;
  std::vector<IVec2> out;
  out.reserve(P.points.size());
  for (const Vec2& p : P.points) {
    double rx = std::round(p.x), ry = std::round(p.y);
    if (std::abs(p.x - rx) > 1e-9 || std::abs(p.y - ry) > 1e-9)
      throw validation_error("as_integer_points: set is not integer-valued");
    out.push_back({static_cast<long long>(rx), static_cast<long long>(ry)});
  }
  return out;
}

PointIndex::PointIndex(const PointSet& P, double cell) : ps_(&P) {
  double wx = std::max(P.window.xmax() - P.window.xmin(), 1e-12);
  double wy = std::max(P.window.ymax() - P.window.ymin(), 1e-12);
  if (cell <= 0.0) {
    std::size_t n = std::max<std::size_t>(P.points.size(), 1);
    cell = std::max(std::sqrt(wx * wy / static_cast<double>(n)), 1e-12);
  }
  cell_ = cell;
  x0_ = P.window.xmin();
  y0_ = P.window.ymin();
  nx_ = std::max(1, static_cast<int>(std::ceil(wx / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(wy / cell_)));
  // Guard against absurd grids for sparse sets.
  while (static_cast<long long>(nx_) * ny_ > 8LL * 1000 * 1000 + 16) {
    cell_ *= 2.0;
    nx_ = std::max(1, static_cast<int>(std::ceil(wx / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(wy / cell_)));
  }

  std::vector<std::uint32_t> counts(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  auto cell_id = [&](const Vec2& p) {
    int cx = cell_of_x(p.x), cy = cell_of_y(p.y);
    return static_cast<std::size_t>(cy) * nx_ + cx;
  };
  for (const Vec2& p : P.points) ++counts[cell_id(p) + 1];
  for (std::size_t i = 1; i < counts.size(); ++i) counts[i] += counts[i - 1];
  cell_start_ = counts;
  order_.resize(P.points.size());
  std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
  for (std::uint32_t i = 0; i < P.points.size(); ++i)
    order_[cursor[cell_id(P.points[i])]++] = i;
}

int PointIndex::cell_of_x(double x) const {
  int c = static_cast<int>(std::floor((x - x0_) / cell_));
  return std::clamp(c, 0, nx_ - 1);
}
int PointIndex::cell_of_y(double y) const {
  int c = static_cast<int>(std::floor((y - y0_) / cell_));
  return std::clamp(c, 0, ny_ - 1);
}

long long PointIndex::count_in_ball(Vec2 x, double R) const {
  if (!ps_->window.contains_ball(x, R))
    throw validation_error("count_in_ball: ball exits the window");
  const double R2 = R * R;
  long long n = 0;
  int cx0 = cell_of_x(x.x - R), cx1 = cell_of_x(x.x + R);
  int cy0 = cell_of_y(x.y - R), cy1 = cell_of_y(x.y + R);
  for (int cy = cy0; cy <= cy1; ++cy) {
    // Clip the x-range of cells by the disc's extent at this cell row.
    for (int cx = cx0; cx <= cx1; ++cx) {
      std::size_t c = static_cast<std::size_t>(cy) * nx_ + cx;
      for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
        if ((ps_->points[order_[k]] - x).norm2() <= R2) ++n;
      }
    }
  }
  return n;
}

void PointIndex::gather(Vec2 x, double R, std::vector<std::uint32_t>& out) const {
  const double R2 = R * R;
  int cx0 = cell_of_x(x.x - R), cx1 = cell_of_x(x.x + R);
  int cy0 = cell_of_y(x.y - R), cy1 = cell_of_y(x.y + R);
  for (int cy = cy0; cy <= cy1; ++cy)
    for (int cx = cx0; cx <= cx1; ++cx) {
      std::size_t c = static_cast<std::size_t>(cy) * nx_ + cx;
      for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k)
        if ((ps_->points[order_[k]] - x).norm2() <= R2)
          out.push_back(order_[k]);
    }
}

}  // namespace lab
