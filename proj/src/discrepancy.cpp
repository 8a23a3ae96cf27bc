#include "lab/discrepancy.hpp"

#include <algorithm>
#include <cmath>

#include "lab/errors.hpp"
#include "lab/numerics.hpp"
#include "lab/sampling.hpp"

namespace lab {

namespace {

double sup_over_centers(const PointIndex& idx, double m, double R,
                        long long n_samples, std::uint64_t seed) {
  const PointSet& P = idx.points();
  Box inner = P.window.shrunk(R);
  if (inner.halfwidth.x < 0 || inner.halfwidth.y < 0)
    throw validation_error("discrepancy_sup: window too small for radius");

  const double target = m * kPi * R * R;
  double sup = std::abs(static_cast<double>(idx.count_in_ball(P.window.center, R)) -
                        target);
  if (inner.halfwidth.x > 0 && inner.halfwidth.y > 0) {
    QuasiSampler qs(seed);
    for (long long i = 0; i < n_samples; ++i) {
      Vec2 x = qs.in_box(static_cast<std::uint64_t>(i), inner);
      double d = std::abs(static_cast<double>(idx.count_in_ball(x, R)) - target);
      sup = std::max(sup, d);
    }
  }
  return sup;
}

}  // namespace

double discrepancy_sup(const PointIndex& idx, double m, double R,
                       long long n_samples, std::uint64_t seed) {
  return sup_over_centers(idx, m, R, n_samples, seed);
}

double discrepancy_sup(const PointSet& P, double m, double R,
                       long long n_samples, std::uint64_t seed) {
  if (P.points.empty()) {
    // Zero measure: |0 - m*pi*R^2| at any center; with m = 0 this is 0.
    return std::abs(m) * kPi * R * R;
  }
  PointIndex idx(P);
  return sup_over_centers(idx, m, R, n_samples, seed);
}

DiscrepancyReport fit_exponent(const PointSet& P, double m,
                               const std::vector<double>& radii,
                               long long n_samples, std::uint64_t seed) {
  if (radii.size() < 4)
    throw validation_error("fit_exponent: need at least 4 radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw validation_error("fit_exponent: radii must be strictly increasing");

  DiscrepancyReport rep;
  rep.radii = radii;
  rep.samples = n_samples;
  rep.seed = seed;

  PointIndex idx(P);
  rep.sup_disc.reserve(radii.size());
  for (double R : radii)
    rep.sup_disc.push_back(sup_over_centers(idx, m, R, n_samples, seed));

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (rep.sup_disc[i] > 0.0) {
      lx.push_back(std::log(radii[i]));
      ly.push_back(std::log(rep.sup_disc[i]));
    }
  }
  if (lx.size() < 2)
    throw validation_error("fit_exponent: all sup_disc vanish, fit undefined");
  auto [a, b] = ols_line(lx, ly);
  rep.fitted_C = std::exp(a);
  rep.fitted_alpha = b;
  return rep;
}

double flux_lower_bound(const PointSet& P, double m, double R, double r_min,
                        FluxInfo* info) {
  if (!(R > 0) || r_min < 0 || !(r_min < R))
    throw validation_error("flux_lower_bound: need 0 <= r_min < R");
  if (!P.window.contains_ball({0, 0}, R))
    throw validation_error("flux_lower_bound: ball B(0,R) exits the window");

  // Sorted distinct jump radii of N(r) inside (r_min, R].
  std::vector<double> rad;
  rad.reserve(P.points.size());
  long long n_at_start = 0;
  for (const Vec2& p : P.points) {
    double r = p.norm();
    if (r <= r_min)
      ++n_at_start;
    else if (r <= R)
      rad.push_back(r);
  }
  std::sort(rad.begin(), rad.end());

  double used_r_min = r_min;
  bool nudged = false;
  if (r_min > 0) {
    for (const Vec2& p : P.points) {
      if (p.norm() == r_min) {
        used_r_min = r_min - 1e-9;
        nudged = true;
        break;
      }
    }
  }
  if (nudged) {
    // Recount with the nudged radius: the point(s) exactly at r_min now jump
    // inside the integration range.
    n_at_start = 0;
    rad.clear();
    for (const Vec2& p : P.points) {
      double r = p.norm();
      if (r <= used_r_min)
        ++n_at_start;
      else if (r <= R)
        rad.push_back(r);
    }
    std::sort(rad.begin(), rad.end());
  }
  if (used_r_min == 0.0 && n_at_start > 0)
    throw validation_error(
        "flux_lower_bound: point at the origin makes the integral divergent");

  if (info) {
    info->used_r_min = used_r_min;
    info->nudged = nudged;
  }

  // On each piece [r1, r2] with constant count a:
  //   int pi*(a - m*pi*r^2)^2 / r dr
  // = pi * [ a^2 ln r - a*m*pi*r^2 + (m*pi)^2 r^4 / 4 ]_{r1}^{r2}
  auto piece = [&](double a, double r1, double r2) {
    if (r2 <= r1) return 0.0;
    double mp = m * kPi;
    double hi, lo;
    if (a == 0.0) {
      hi = mp * mp * r2 * r2 * r2 * r2 / 4.0;
      lo = mp * mp * r1 * r1 * r1 * r1 / 4.0;
      return kPi * (hi - lo);
    }
    hi = a * a * std::log(r2) - a * mp * r2 * r2 + mp * mp * r2 * r2 * r2 * r2 / 4.0;
    lo = a * a * std::log(r1) - a * mp * r1 * r1 + mp * mp * r1 * r1 * r1 * r1 / 4.0;
    return kPi * (hi - lo);
  };

  double total = 0.0;
  double r_prev = used_r_min;
  double a = static_cast<double>(n_at_start);
  std::size_t i = 0;
  while (i < rad.size()) {
    double r = rad[i];
    total += piece(a, r_prev, r);
    // absorb multiplicities at the same radius
    while (i < rad.size() && rad[i] == r) {
      a += 1.0;
      ++i;
    }
    r_prev = r;
  }
  total += piece(a, r_prev, R);
  return total;
}

}  // namespace lab
