#include "lab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <unordered_map>

#include "lab/errors.hpp"
#include "lab/numerics.hpp"

namespace lab {

namespace {

bool on_integer_axis(Vec2 x, double kmin) {
  if (x.y != 0.0) return false;
  if (std::abs(x.x) > 1e15) return false;
  double r = std::round(x.x);
  return x.x == r && r >= kmin;
}

// cot(w) for complex w, stable for large |Im w|:
// cot w = i (q+1)/(q-1) with q = e^{2iw} when Im w >= 0 (|q| <= 1),
// and the e^{-2iw} mirror otherwise.
std::complex<double> cot_complex(std::complex<double> w) {
  const std::complex<double> I{0.0, 1.0};
  if (w.imag() >= 0) {
    std::complex<double> q = std::exp(2.0 * I * w);
    return I * (q + 1.0) / (q - 1.0);
  }
  std::complex<double> q = std::exp(-2.0 * I * w);
  return I * (1.0 + q) / (1.0 - q);
}

}  // namespace

Vec2 field_V1(Vec2 x) {
  if (on_integer_axis(x, -std::numeric_limits<double>::infinity()))
    throw validation_error("field_V1: singular point");
  std::complex<double> z{x.x, x.y};
  std::complex<double> h = kPi * cot_complex(kPi * z);  // d/dz log sin(pi z)
  // grad of -Re log sin(pi z) = (-Re h, +Im h).
  return {-h.real(), h.imag()};
}

SingularField make_field_V1(const Box& window) {
  SingularField f;
  f.evaluate = [](Vec2 x) { return field_V1(x); };
  f.background = 0.0;
  f.label = "grad_V1_Z";
  f.tail_error = 0.0;
  f.window = window;
  long long k0 = static_cast<long long>(std::ceil(window.xmin()));
  long long k1 = static_cast<long long>(std::floor(window.xmax()));
  if (window.ymin() <= 0.0 && window.ymax() >= 0.0)
    for (long long k = k0; k <= k1; ++k)
      f.singular_points.push_back({{static_cast<double>(k), 0.0}, 1.0});
  return f;
}

Vec2 h1_sum(Vec2 z, double tol) {
  if (on_integer_axis(z, 1.0))
    throw validation_error("field_H1: singular point");
  (void)tol;  // T = 10 with the digamma tail already reaches ~1e-15
  double r = std::hypot(z.x, z.y);
  long long K = std::max<long long>(1, static_cast<long long>(std::ceil(2.0 * r))) + 10;

  // sum_{k=1..K} [1/(k - z) - 1/k]
  double re = 0.0, im = 0.0;
  for (long long k = 1; k <= K; ++k) {
    double dx = static_cast<double>(k) - z.x;
    double den = dx * dx + z.y * z.y;
    re += dx / den - 1.0 / static_cast<double>(k);
    im += z.y / den;
  }
  // tail: psi(K+1) - psi(K+1-z), both arguments large.
  std::complex<double> tail =
      digamma_asymptotic(static_cast<double>(K + 1)) -
      digamma_asymptotic(std::complex<double>(static_cast<double>(K + 1) - z.x,
                                              -z.y));
  return {re + tail.real(), im + tail.imag()};
}

Vec2 field_H1(Vec2 x, double tol) {
  Vec2 f = h1_sum(x, tol);
  return {f.x, -f.y};
}

SingularField make_field_H1(const Box& window, double tol) {
  SingularField f;
  f.evaluate = [tol](Vec2 x) { return field_H1(x, tol); };
  f.background = 0.0;
  f.label = "grad_H1_N";
  f.tail_error = std::max(tol, 5e-14);
  f.window = window;
  long long k0 = std::max<long long>(1, static_cast<long long>(std::ceil(window.xmin())));
  long long k1 = static_cast<long long>(std::floor(window.xmax()));
  if (window.ymin() <= 0.0 && window.ymax() >= 0.0)
    for (long long k = k0; k <= k1; ++k)
      f.singular_points.push_back({{static_cast<double>(k), 0.0}, 1.0});
  return f;
}

// ---------------------------------------------------------------------------
// Multiscale construction.

namespace {

// V'(t) of the radial profile: -3t on [0,1/2], t - 1/t on (1/2,1], 0 beyond.
double profile_slope(double t) {
  if (t <= 0.5) return -3.0 * t;
  if (t <= 1.0) return t - 1.0 / t;
  return 0.0;
}

}  // namespace

Vec2 multiscale_scale_at(const PointIndex& idx, int k, Vec2 x) {
  const double Rk = std::ldexp(1.0, k - 1);  // 2^{k-1}
  std::vector<std::uint32_t> nearby;
  idx.gather(x, Rk, nearby);
  Vec2 acc{0, 0};
  const auto& pts = idx.points().points;
  for (std::uint32_t i : nearby) {
    Vec2 d = x - pts[i];
    double r = d.norm();
    if (r == 0.0) continue;
    double g;
    if (k == 1) {
      g = r <= 1.0 ? (-1.0 / r + r) : 0.0;
    } else {
      g = profile_slope(r / Rk) / Rk;
    }
    if (g != 0.0) acc += d * (g / r);
  }
  return acc;
}

double measure_scale_sup(const PointSet& P, int k, int grid_n) {
  const double Rk = std::ldexp(1.0, k - 1);
  Box valid = P.window.shrunk(Rk);
  if (!valid.valid())
    throw validation_error("measure_scale_sup: window too small for scale");
  PointIndex idx(P, 1.0);
  // Sample a 4x4-length patch near the window center with an irrational
  // offset so lattice points are avoided.
  double half = std::min({2.0, valid.halfwidth.x, valid.halfwidth.y});
  double sup = 0.0;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j) {
      Vec2 x{valid.center.x - half + (2 * half) * (i + 0.271828) / grid_n,
             valid.center.y - half + (2 * half) * (j + 0.577215) / grid_n};
      sup = std::max(sup, multiscale_scale_at(idx, k, x).norm());
    }
  return sup;
}

MultiscaleField make_field_multiscale(const PointSet& P, double m, int K) {
  if (K < 1) throw validation_error("make_field_multiscale: K >= 1");
  if (P.points.size() >= 2 && !(min_separation(P) > 0))
    throw validation_error("make_field_multiscale: P is not uniform");
  const double RK = std::ldexp(1.0, K - 1);
  Box valid = P.window.shrunk(RK);
  if (!valid.valid())
    throw validation_error("make_field_multiscale: window too small for K");

  auto idx = std::make_shared<PointIndex>(P, 1.0);
  MultiscaleField out;
  out.field.evaluate = [idx, K, RK, valid](Vec2 x) {
    if (!valid.contains(x))
      throw validation_error(
          "field_multiscale: x too close to the window boundary for scale K");
    std::vector<std::uint32_t> nearby;
    idx->gather(x, RK, nearby);
    Vec2 acc{0, 0};
    const auto& pts = idx->points().points;
    for (std::uint32_t i : nearby) {
      Vec2 d = x - pts[i];
      double r = d.norm();
      if (r == 0.0)
        return Vec2{std::numeric_limits<double>::infinity(), 0.0};
      double g = 0.0;
      if (r <= 1.0) g += -1.0 / r + r;
      for (int k = 2; k <= K; ++k) {
        double Rk = std::ldexp(1.0, k - 1);
        if (r <= Rk) g += profile_slope(r / Rk) / Rk;
      }
      if (g != 0.0) acc += d * (g / r);
    }
    return acc;
  };
  out.field.background = m;
  out.field.label = "multiscale_K" + std::to_string(K);
  out.field.window = valid;
  for (const Vec2& p : P.points) out.field.singular_points.push_back({p, 1.0});

  for (int k = 1; k <= K; ++k) out.scale_sup.push_back(measure_scale_sup(P, k));
  // Geometric tail estimate from the measured decay of the last scales.
  double tail = 0.0;
  if (K >= 2 && out.scale_sup[K - 2] > 0) {
    double rho = out.scale_sup[K - 1] / out.scale_sup[K - 2];
    rho = std::min(std::max(rho, 0.1), 0.95);
    tail = out.scale_sup[K - 1] * rho / (1.0 - rho);
  }
  out.field.tail_error = tail;
  return out;
}

// ---------------------------------------------------------------------------
// Relocation field (periodic background + disc-Neumann dipoles).

Vec2 ewald_grad_V(Vec2 x, double tol) {
  // grad V(x) = -sum_{k in Z^2} (x-k)/|x-k|^2 e^{-pi|x-k|^2}
  //             -sum_{p != 0} sin(2 pi p.x) p/|p|^2 e^{-pi|p|^2},
  // from the split of V at s0 = 1.
  const double T = -std::log(std::min(tol, 1e-3)) + 8.0;
  const double rc = std::sqrt(T / kPi);
  Vec2 acc{0, 0};
  long long kx0 = static_cast<long long>(std::floor(x.x - rc));
  long long kx1 = static_cast<long long>(std::ceil(x.x + rc));
  long long ky0 = static_cast<long long>(std::floor(x.y - rc));
  long long ky1 = static_cast<long long>(std::ceil(x.y + rc));
  for (long long kx = kx0; kx <= kx1; ++kx)
    for (long long ky = ky0; ky <= ky1; ++ky) {
      Vec2 d{x.x - static_cast<double>(kx), x.y - static_cast<double>(ky)};
      double r2 = d.norm2();
      if (r2 == 0.0)
        return {std::numeric_limits<double>::infinity(), 0.0};
      if (r2 > rc * rc) continue;
      acc -= d * (std::exp(-kPi * r2) / r2);
    }
  long long pmax = static_cast<long long>(std::ceil(std::sqrt(T / kPi)));
  for (long long px = -pmax; px <= pmax; ++px)
    for (long long py = -pmax; py <= pmax; ++py) {
      if (px == 0 && py == 0) continue;
      double p2 = static_cast<double>(px * px + py * py);
      if (kPi * p2 > T) continue;
      double s = std::sin(2.0 * kPi * (px * x.x + py * x.y));
      double w = std::exp(-kPi * p2) / p2 * s;
      acc -= Vec2{static_cast<double>(px), static_cast<double>(py)} * w;
    }
  return acc;
}

namespace {

struct IVec2Hash {
  std::size_t operator()(const IVec2& v) const {
    unsigned long long h = static_cast<unsigned long long>(v.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<unsigned long long>(v.y) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// grad of the disc-Neumann dipole potential on B(c, R):
// U = h(xi, 0) - h(xi, q) with h(xi, y) = -log|xi - y| - log|xi - y/|y|^2|;
// each h has constant normal derivative on the unit circle, so U has exact
// zero Neumann data. grad extended by zero outside the disc.
Vec2 dipole_grad(Vec2 x, Vec2 center, Vec2 target, double R) {
  Vec2 xi = (x - center) / R;
  double xi2 = xi.norm2();
  if (xi2 >= 1.0) return {0, 0};
  Vec2 q = (target - center) / R;
  Vec2 qhat = q / q.norm2();
  Vec2 g = xi * (-1.0 / xi2);
  Vec2 d1 = xi - q;
  g += d1 * (1.0 / d1.norm2());
  Vec2 d2 = xi - qhat;
  g += d2 * (1.0 / d2.norm2());
  return g / R;
}

}  // namespace

SingularField make_field_move(const PointSet& P,
                              const std::map<IVec2, IVec2>& Phi, double tol) {
  std::vector<IVec2> pts = as_integer_points(P);

  // Bijectivity over the window interior: targets distinct, all integer
  // points of the shrunk window covered.
  std::unordered_map<IVec2, IVec2, IVec2Hash> forward;
  std::unordered_map<IVec2, int, IVec2Hash> image;
  double sup_disp = 0.0;
  for (const IVec2& p : pts) {
    auto it = Phi.find(p);
    if (it == Phi.end())
      throw validation_error("field_move: Phi is not defined on every point");
    forward.emplace(p, it->second);
    if (++image[it->second] > 1)
      throw validation_error("field_move: Phi is not injective");
    double dx = static_cast<double>(it->second.x - p.x);
    double dy = static_cast<double>(it->second.y - p.y);
    sup_disp = std::max(sup_disp, std::hypot(dx, dy));
  }
  const double R1 = 2.0 * sup_disp;

  Box cover = P.window.shrunk(R1 + 1.0);
  if (cover.valid()) {
    for (long long qx = static_cast<long long>(std::ceil(cover.xmin()));
         qx <= static_cast<long long>(std::floor(cover.xmax())); ++qx)
      for (long long qy = static_cast<long long>(std::ceil(cover.ymin()));
           qy <= static_cast<long long>(std::floor(cover.ymax())); ++qy)
        if (!image.count({qx, qy}))
          throw validation_error(
              "field_move: Phi is not onto Z^2 over the window interior");
  }

  SingularField f;
  f.background = 1.0;
  f.label = "move_field";
  f.tail_error = tol;
  f.window = P.window.shrunk(R1);
  for (const Vec2& p : P.points) f.singular_points.push_back({p, 1.0});

  if (R1 == 0.0) {
    // Identity relocation: all dipoles vanish and j = grad V exactly.
    f.evaluate = [tol](Vec2 x) { return ewald_grad_V(x, tol); };
    return f;
  }

  auto idx = std::make_shared<PointIndex>(P, std::max(R1 / 4.0, 0.5));
  auto fwd = std::make_shared<std::unordered_map<IVec2, IVec2, IVec2Hash>>(
      std::move(forward));
  f.evaluate = [idx, fwd, R1, tol](Vec2 x) {
    Vec2 acc = ewald_grad_V(x, tol);
    std::vector<std::uint32_t> nearby;
    idx->gather(x, R1, nearby);
    const auto& pts2 = idx->points().points;
    for (std::uint32_t i : nearby) {
      Vec2 pc = pts2[i];
      IVec2 pi{static_cast<long long>(std::llround(pc.x)),
               static_cast<long long>(std::llround(pc.y))};
      const IVec2& t = fwd->at(pi);
      if (t == pi) continue;
      acc += dipole_grad(x, pc,
                         {static_cast<double>(t.x), static_cast<double>(t.y)},
                         R1);
    }
    return acc;
  };
  return f;
}

SingularField field_combine(const SingularField& f, const SingularField& g,
                            int sign) {
  if (sign != 1 && sign != -1)
    throw validation_error("field_combine: sign must be +1 or -1");
  const double s = static_cast<double>(sign);

  SingularField out;
  out.background = f.background + s * g.background;
  out.tail_error = f.tail_error + g.tail_error;
  out.label = f.label + (sign > 0 ? "+" : "-") + g.label;

  // Intersection window.
  double x0 = std::max(f.window.xmin(), g.window.xmin());
  double x1 = std::min(f.window.xmax(), g.window.xmax());
  double y0 = std::max(f.window.ymin(), g.window.ymin());
  double y1 = std::min(f.window.ymax(), g.window.ymax());
  if (!(x1 > x0 && y1 > y0))
    throw validation_error("field_combine: windows do not overlap");
  out.window = Box({(x0 + x1) / 2, (y0 + y1) / 2}, {(x1 - x0) / 2, (y1 - y0) / 2});

  auto fe = f.evaluate;
  auto ge = g.evaluate;
  out.evaluate = [fe, ge, s](Vec2 x) { return fe(x) + ge(x) * s; };

  // Merge registries: keys rounded to a 1e-9 grid, signed coefficients add,
  // zeros drop.
  struct Key {
    long long x, y;
    bool operator==(const Key& o) const { return x == o.x && y == o.y; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      unsigned long long h = static_cast<unsigned long long>(k.x) * 0x9E3779B97F4A7C15ULL;
      h ^= static_cast<unsigned long long>(k.y) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
      return static_cast<std::size_t>(h);
    }
  };
  auto key_of = [](Vec2 p) {
    return Key{static_cast<long long>(std::llround(p.x * 1e9)),
               static_cast<long long>(std::llround(p.y * 1e9))};
  };
  std::unordered_map<Key, Singularity, KeyHash> merged;
  for (const Singularity& sg : f.singular_points) {
    auto [it, fresh] = merged.emplace(key_of(sg.p), sg);
    if (!fresh) it->second.alpha += sg.alpha;
  }
  for (const Singularity& sg : g.singular_points) {
    Singularity signed_sg{sg.p, s * sg.alpha};
    auto [it, fresh] = merged.emplace(key_of(sg.p), signed_sg);
    if (!fresh) it->second.alpha += signed_sg.alpha;
  }
  for (auto& [k, sg] : merged)
    if (std::abs(sg.alpha) > 1e-12) out.singular_points.push_back(sg);
  std::sort(out.singular_points.begin(), out.singular_points.end(),
            [](const Singularity& a, const Singularity& b) {
              return a.p.x != b.p.x ? a.p.x < b.p.x : a.p.y < b.p.y;
            });

  // The merged set must stay of uniform type.
  if (out.singular_points.size() >= 2) {
    PointSet tmp;
    double bx0 = 1e300, bx1 = -1e300, by0 = 1e300, by1 = -1e300;
    for (const auto& sg : out.singular_points) {
      bx0 = std::min(bx0, sg.p.x);
      bx1 = std::max(bx1, sg.p.x);
      by0 = std::min(by0, sg.p.y);
      by1 = std::max(by1, sg.p.y);
    }
    tmp.window = Box({(bx0 + bx1) / 2, (by0 + by1) / 2},
                     {(bx1 - bx0) / 2 + 1, (by1 - by0) / 2 + 1});
    for (const auto& sg : out.singular_points) tmp.points.push_back(sg.p);
    tmp.weights.assign(tmp.points.size(), 1.0);
    if (min_separation(tmp) < 1e-6)
      throw validation_error("field_combine: merged registry is not uniform");
  }
  return out;
}

}  // namespace lab
