#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace lab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

// Exponential integral E1(x), x > 0. Series for x <= 1, continued fraction
// (modified Lentz) for x > 1. Absolute accuracy near machine epsilon.
double expint_e1(double x);

// Digamma by the asymptotic series, valid for Re(w) >= 12 or so.
// Callers must shift the argument into that range themselves.
std::complex<double> digamma_asymptotic(std::complex<double> w);
double digamma_asymptotic(double w);

// Gauss-Legendre nodes/weights on [-1,1]. Cached per order.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

// Ordinary least squares for y = a + b*x. Returns {a, b}.
std::pair<double, double> ols_line(const std::vector<double>& x,
                                   const std::vector<double>& y);

// Polynomial extrapolation (Neville) of (t_i, y_i) to t = 0 using all points.
double extrapolate_to_zero(const std::vector<double>& t,
                           const std::vector<double>& y);

}  // namespace lab
