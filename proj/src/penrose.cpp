#include "lab/penrose.hpp"

#include <algorithm>
#include <cmath>

#include "lab/errors.hpp"
#include "lab/numerics.hpp"

namespace lab {

double GoldenInt::value() const {
  const long double phi = 1.61803398874989484820458683436563811772L;
  return static_cast<double>(static_cast<long double>(a) +
                             static_cast<long double>(b) * phi);
}

namespace {

double heron(double a, double b, double c) {
  double s = 0.5 * (a + b + c);
  return std::sqrt(s * (s - a) * (s - b) * (s - c));
}

constexpr double kInvPhi2 = 1.0 / (kGoldenRatio * kGoldenRatio);
constexpr double kInvPhi = 1.0 / kGoldenRatio;

// phi*Omega1 {apex A, base B, C} -> type1 {D; A, B} + type2 {C; A, D},
// D cutting the base at the 1/phi^2 fraction from B.
void split_scaled_type1(const std::array<Vec2, 3>& v, int gen,
                        std::vector<RobinsonTriangle>& out) {
  Vec2 A = v[0], B = v[1], C = v[2];
  Vec2 D = B + (C - B) * kInvPhi2;
  out.push_back({TriangleKind::type1, {D, A, B}, gen});
  out.push_back({TriangleKind::type2, {C, A, D}, gen});
}

// phi*Omega2 {apex P, base Q, R} -> type2 {R; E, Q} + split of the
// phi*Omega1 piece {E; P, R}.
void split_scaled_type2(const std::array<Vec2, 3>& v, int gen,
                        std::vector<RobinsonTriangle>& out) {
  Vec2 P = v[0], Q = v[1], R = v[2];
  Vec2 E = P + (Q - P) * kInvPhi;
  out.push_back({TriangleKind::type2, {R, E, Q}, gen});
  split_scaled_type1({E, P, R}, gen, out);
}

}  // namespace

double RobinsonTriangle::area() const {
  return 0.5 * std::abs((v[1] - v[0]).cross(v[2] - v[0]));
}

double Tiling::total_area() const {
  double s = 0.0;
  for (const auto& t : triangles) s += t.area();
  return s;
}

double area_type1() { return heron(1.0, 1.0, kGoldenRatio); }
double area_type2() { return heron(kGoldenRatio, kGoldenRatio, 1.0); }

Tiling seed_tiling() {
  Tiling t;
  // Apex at the origin, legs of length 1 at +-54 degrees; base length
  // 2*sin(54deg) = phi exactly.
  double ang = 54.0 * kPi / 180.0;
  Vec2 apex{0, 0};
  Vec2 b1{std::cos(ang), -std::sin(ang)};
  Vec2 b2{std::cos(ang), std::sin(ang)};
  t.triangles.push_back({TriangleKind::type1, {apex, b1, b2}, 0});
  t.generation = 0;
  return t;
}

Tiling inflate(const Tiling& t) {
  Tiling out;
  out.p1_bary = t.p1_bary;
  out.p2_bary = t.p2_bary;
  out.generation = t.generation + 1;
  out.triangles.reserve(t.triangles.size() * 3);
  for (const auto& tri : t.triangles) {
    std::array<Vec2, 3> s;
    for (int i = 0; i < 3; ++i) s[i] = tri.v[i] * kGoldenRatio;
    if (tri.kind == TriangleKind::type1)
      split_scaled_type1(s, out.generation, out.triangles);
    else
      split_scaled_type2(s, out.generation, out.triangles);
  }
  return out;
}

namespace {

void check_anchor(const std::array<double, 3>& b, const char* name) {
  double sum = b[0] + b[1] + b[2];
  if (std::abs(sum - 1.0) > 1e-12)
    throw validation_error(std::string(name) +
                           ": barycentric coordinates must sum to 1");
  for (double c : b)
    if (!(c > 0.0))
      throw validation_error(std::string(name) +
                             ": anchor must be strictly interior");
}

// Largest axis-aligned square inscribed in the incircle of the triangle.
Box inscribed_box(const RobinsonTriangle& t) {
  double a = (t.v[1] - t.v[2]).norm();
  double b = (t.v[0] - t.v[2]).norm();
  double c = (t.v[0] - t.v[1]).norm();
  double per = a + b + c;
  Vec2 incenter = (t.v[0] * a + t.v[1] * b + t.v[2] * c) / per;
  double r = 2.0 * t.area() / per;
  double hw = r / std::sqrt(2.0);
  return Box(incenter, {hw, hw});
}

}  // namespace

PointSet penrose_points(int n, const std::array<double, 3>& p1_bary,
                        const std::array<double, 3>& p2_bary) {
  if (n < 0) throw validation_error("penrose_points: n must be >= 0");
  check_anchor(p1_bary, "penrose_points p1");
  check_anchor(p2_bary, "penrose_points p2");

  Tiling t = seed_tiling();
  t.p1_bary = p1_bary;
  t.p2_bary = p2_bary;
  for (int i = 0; i < n; ++i) t = inflate(t);

  PointSet P;
  P.label = "penrose_n" + std::to_string(n);
  // Domain = phi^n * Omega_1: rebuild the inflated outer triangle.
  RobinsonTriangle outer = seed_tiling().triangles[0];
  double scale = std::pow(kGoldenRatio, n);
  for (auto& v : outer.v) v = v * scale;
  P.window = inscribed_box(outer);
  P.points.reserve(t.triangles.size());
  for (const auto& tri : t.triangles)
    P.points.push_back(tri.barycentric(
        tri.kind == TriangleKind::type1 ? p1_bary : p2_bary));
  P.weights.assign(P.points.size(), 1.0);
  return P;
}

PointSet penrose_points(int n) {
  return penrose_points(n, {1.0 / 3, 1.0 / 3, 1.0 / 3},
                        {1.0 / 3, 1.0 / 3, 1.0 / 3});
}

std::pair<std::int64_t, std::int64_t> tile_counts(int n) {
  if (n < 0) throw validation_error("tile_counts: n must be >= 0");
  // u_0 = 1, u_1 = 0, u_{k+2} = u_{k+1} + u_k.
  std::int64_t u0 = 1, u1 = 0;
  for (int k = 0; k < 2 * n; ++k) {
    std::int64_t u2 = u1 + u0;
    u0 = u1;
    u1 = u2;
  }
  std::pair<std::int64_t, std::int64_t> res{u0, u1};

  // Cross-check against the closed form, rounded to nearest integer.
  const long double phi = 1.61803398874989484820458683436563811772L;
  auto closed = [&](int k) {
    long double v = std::pow(phi, static_cast<long double>(k)) / (phi + 2) +
                    std::pow(-phi, static_cast<long double>(-k)) * (phi + 1) /
                        (phi + 2);
    return static_cast<std::int64_t>(std::llroundl(v));
  };
  if (n <= 40 && (closed(2 * n) != res.first || closed(2 * n + 1) != res.second))
    throw defect_error("tile_counts: recurrence and closed form disagree");
  return res;
}

namespace {

// M_n = m_n * |Omega_1| = (u_{2n} + u_{2n+1}) / (u_{2n} + phi u_{2n+1}),
// with u replaced by v (v_0 = 0, v_1 = 1) for the type2 version Q_n.
GoldenFrac density_times_area(int n, bool type2) {
  std::int64_t a0 = type2 ? 0 : 1, a1 = type2 ? 1 : 0;
  for (int k = 0; k < 2 * n; ++k) {
    std::int64_t a2 = a1 + a0;
    a0 = a1;
    a1 = a2;
  }
  GoldenFrac f;
  f.num = GoldenInt(a0 + a1, 0);
  f.den = GoldenInt(a0, a1);
  return f;
}

GoldenFrac limit_density_times_area() {
  GoldenFrac f;
  f.num = GoldenInt(1, 1);  // 1 + phi
  f.den = GoldenInt(2, 1);  // 1 + phi^2 = 2 + phi
  return f;
}

}  // namespace

Densities densities(int n) {
  if (n < 0) throw validation_error("densities: n must be >= 0");
  double A1 = area_type1();
  Densities d;
  d.m_n = density_times_area(n, false).value() / A1;
  d.q_n = density_times_area(n, true).value() / A1;
  d.m_limit = limit_density_times_area().value() / A1;
  return d;
}

double density_ratio_exact(int n) {
  GoldenFrac M = limit_density_times_area();
  GoldenFrac top = density_times_area(n + 1, false) - M;
  GoldenFrac bot = density_times_area(n, false) - M;
  return (top / bot).value();
}

GoldenFrac density_step_m(int n) {
  if (n < 1) throw validation_error("density_step_m: n must be >= 1");
  return density_times_area(n, false) - density_times_area(n - 1, false);
}

GoldenFrac density_step_q(int n) {
  if (n < 1) throw validation_error("density_step_q: n must be >= 1");
  return density_times_area(n, false) - density_times_area(n - 1, true);
}

// ---------------------------------------------------------------------------
// Zero-Neumann Poisson solve on the rasterized inflated triangle.

namespace {

struct Raster {
  int nx = 0, ny = 0;
  double h = 0.0;
  double x0 = 0.0, y0 = 0.0;
  std::vector<int> cell;  // -1 outside; else active index
  std::vector<int> ix, iy;

  int at(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
    return cell[static_cast<std::size_t>(j) * nx + i];
  }
};

bool point_in_triangle(Vec2 p, const std::array<Vec2, 3>& v) {
  double d0 = (v[1] - v[0]).cross(p - v[0]);
  double d1 = (v[2] - v[1]).cross(p - v[1]);
  double d2 = (v[0] - v[2]).cross(p - v[2]);
  bool pos = d0 > 0 || d1 > 0 || d2 > 0;
  bool neg = d0 < 0 || d1 < 0 || d2 < 0;
  return !(pos && neg);
}

}  // namespace

std::vector<DecayRow> correction_decay(int n_max, double grid_h) {
  if (n_max < 1 || n_max > 8)
    throw validation_error("correction_decay: n_max must be in 1..8");
  if (!(grid_h > 0) || grid_h > 0.1)
    throw validation_error(
        "correction_decay: grid_h must be in (0, 0.1] to resolve the tiles");

  const double A1 = area_type1();
  std::vector<DecayRow> rows;

  // First-level decomposition of the unit seed: two children spanning
  // phi*Omega_1; scaled by phi^{n-1} they are the copies of
  // phi^{n-1}Omega_1 and phi^{n-1}Omega_2 carrying the two RHS values.
  Tiling level1 = inflate(seed_tiling());
  const RobinsonTriangle& child1 =
      level1.triangles[0].kind == TriangleKind::type1 ? level1.triangles[0]
                                                      : level1.triangles[1];
  const RobinsonTriangle& child2 =
      level1.triangles[0].kind == TriangleKind::type2 ? level1.triangles[0]
                                                      : level1.triangles[1];

  for (int n = 1; n <= n_max; ++n) {
    DecayRow row;
    row.n = n;
    double a = density_step_m(n).value() / A1;
    double b = density_step_q(n).value() / A1;
    row.rhs_norm = std::max(std::abs(a), std::abs(b));

    // Rasterize phi^n * Omega_1.
    double scale = std::pow(kGoldenRatio, n - 1);
    std::array<Vec2, 3> t1, t2;
    for (int i = 0; i < 3; ++i) {
      t1[i] = child1.v[i] * scale;
      t2[i] = child2.v[i] * scale;
    }
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& tv : {t1, t2})
      for (const Vec2& v : tv) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
      }

    Raster r;
    r.h = grid_h * std::pow(kGoldenRatio, n);
    r.x0 = xmin - r.h;
    r.y0 = ymin - r.h;
    r.nx = static_cast<int>(std::ceil((xmax - r.x0) / r.h)) + 1;
    r.ny = static_cast<int>(std::ceil((ymax - r.y0) / r.h)) + 1;
    r.cell.assign(static_cast<std::size_t>(r.nx) * r.ny, -1);

    std::vector<double> rhs;
    for (int j = 0; j < r.ny; ++j)
      for (int i = 0; i < r.nx; ++i) {
        Vec2 c{r.x0 + (i + 0.5) * r.h, r.y0 + (j + 0.5) * r.h};
        bool in1 = point_in_triangle(c, t1);
        bool in2 = !in1 && point_in_triangle(c, t2);
        if (!in1 && !in2) continue;
        r.cell[static_cast<std::size_t>(j) * r.nx + i] =
            static_cast<int>(rhs.size());
        r.ix.push_back(i);
        r.iy.push_back(j);
        rhs.push_back(in1 ? a : b);
      }
    const std::size_t m = rhs.size();
    if (m < 16) throw defect_error("correction_decay: raster too coarse");

    // Mean-correct the RHS to exactly zero total integral.
    double mean = 0.0;
    for (double v : rhs) mean += v;
    mean /= static_cast<double>(m);
    for (double& v : rhs) v -= mean;

    // CG on the five-point zero-Neumann Laplacian (missing neighbors drop
    // out, which is the mirror condition on the staircase boundary).
    auto apply = [&](const std::vector<double>& u, std::vector<double>& out) {
      const double inv_h2 = 1.0 / (r.h * r.h);
      for (std::size_t k = 0; k < m; ++k) {
        int i = r.ix[k], j = r.iy[k];
        double s = 0.0;
        int nb;
        nb = r.at(i + 1, j);
        if (nb >= 0) s += u[k] - u[nb];
        nb = r.at(i - 1, j);
        if (nb >= 0) s += u[k] - u[nb];
        nb = r.at(i, j + 1);
        if (nb >= 0) s += u[k] - u[nb];
        nb = r.at(i, j - 1);
        if (nb >= 0) s += u[k] - u[nb];
        out[k] = s * inv_h2;
      }
    };
    auto project = [&](std::vector<double>& u) {
      double s = 0.0;
      for (double v : u) s += v;
      s /= static_cast<double>(m);
      for (double& v : u) v -= s;
    };

    std::vector<double> u(m, 0.0), res(rhs), p(rhs), Ap(m, 0.0);
    project(res);
    p = res;
    double rr = 0.0;
    for (double v : res) rr += v * v;
    const double rr0 = rr;
    int iter = 0;
    for (; iter < 200000 && rr > 1e-20 * rr0; ++iter) {
      apply(p, Ap);
      double pAp = 0.0;
      for (std::size_t k = 0; k < m; ++k) pAp += p[k] * Ap[k];
      if (pAp <= 0) break;
      double alpha = rr / pAp;
      for (std::size_t k = 0; k < m; ++k) {
        u[k] += alpha * p[k];
        res[k] -= alpha * Ap[k];
      }
      double rr_new = 0.0;
      for (double v : res) rr_new += v * v;
      double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t k = 0; k < m; ++k) p[k] = res[k] + beta * p[k];
      if ((iter & 63) == 63) project(res);
    }

    double gmax = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      int i = r.ix[k], j = r.iy[k];
      int nb = r.at(i + 1, j);
      if (nb >= 0) gmax = std::max(gmax, std::abs(u[k] - u[nb]) / r.h);
      nb = r.at(i, j + 1);
      if (nb >= 0) gmax = std::max(gmax, std::abs(u[k] - u[nb]) / r.h);
    }
    row.grad_norm = gmax;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace lab
