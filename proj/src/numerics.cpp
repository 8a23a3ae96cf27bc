#include "lab/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "lab/errors.hpp"

namespace lab {

double expint_e1(double x) {
  if (!(x > 0)) throw validation_error("expint_e1: argument must be positive");
  if (x <= 1.0) {
    // E1(x) = -gamma - ln x + sum_{n>=1} (-1)^{n+1} x^n / (n * n!)
    double sum = 0.0;
    double term = 1.0;
    for (int n = 1; n <= 40; ++n) {
      term *= -x / n;
      double add = -term / n;
      sum += add;
      if (std::abs(add) < 1e-18 * (std::abs(sum) + 1e-30)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
  }
  // Continued fraction: E1(x) = e^{-x} * 1/(x+1- 1/(x+3- 4/(x+5- 9/(...))))
  const double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 200; ++i) {
    double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = a * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x) * h;
}

namespace {
// B_{2n}/(2n) for the digamma asymptotic series.
constexpr double kDigammaCoef[] = {
    1.0 / 12.0,    -1.0 / 120.0,   1.0 / 252.0,     -1.0 / 240.0,
    1.0 / 132.0,   -691.0 / 32760.0, 1.0 / 12.0,
};
}  // namespace

std::complex<double> digamma_asymptotic(std::complex<double> w) {
  // psi(w) ~ ln w - 1/(2w) - sum_n B_{2n}/(2n w^{2n})
  std::complex<double> inv = 1.0 / w;
  std::complex<double> inv2 = inv * inv;
  std::complex<double> res = std::log(w) - 0.5 * inv;
  std::complex<double> p = inv2;
  for (double c : kDigammaCoef) {
    res -= c * p;
    p *= inv2;
  }
  return res;
}

double digamma_asymptotic(double w) {
  double inv = 1.0 / w;
  double inv2 = inv * inv;
  double res = std::log(w) - 0.5 * inv;
  double p = inv2;
  for (double c : kDigammaCoef) {
    res -= c * p;
    p *= inv2;
  }
  return res;
}

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw validation_error("gauss_legendre: order must be >= 1");
  static std::map<int, GaussLegendre> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  // Newton iteration on P_n from the Chebyshev initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  auto [pos, inserted] = cache.emplace(n, std::move(gl));
  return pos->second;
}

std::pair<double, double> ols_line(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw validation_error("ols_line: need >= 2 matching samples");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw validation_error("ols_line: degenerate abscissae");
  double b = (n * sxy - sx * sy) / denom;
  double a = (sy - b * sx) / n;
  return {a, b};
}

double extrapolate_to_zero(const std::vector<double>& t,
                           const std::vector<double>& y) {
  if (t.size() != y.size() || t.empty())
    throw validation_error("extrapolate_to_zero: bad inputs");
  std::vector<double> p = y;
  const std::size_t n = t.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      double denom = t[i] - t[i + level];
      if (denom == 0.0)
        throw validation_error("extrapolate_to_zero: repeated abscissa");
      // Neville recurrence evaluated at 0.
      p[i] = (-t[i + level] * p[i] + t[i] * p[i + 1]) / denom;
    }
  }
  return p[0];
}

}  // namespace lab
