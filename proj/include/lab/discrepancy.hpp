#pragma once

#include <cstdint>
#include <vector>

#include "lab/pointset.hpp"

namespace lab {

struct DiscrepancyReport {
  std::vector<double> radii;
  std::vector<double> sup_disc;  // sup over sampled centers of |count - m*pi*R^2|
  double fitted_C = 0.0;
  double fitted_alpha = 0.0;  // sup_disc ~ C * R^alpha
  long long samples = 0;
  std::uint64_t seed = 0;
};

// Max over n_samples quasi-random centers (plus the window center) of
// |count_in_ball(P,x,R) - m*pi*R^2|. Centers are drawn from the window shrunk
// by R so every ball fits.
double discrepancy_sup(const PointSet& P, double m, double R,
                       long long n_samples, std::uint64_t seed);

// Same, reusing a prebuilt index (for repeated radii).
double discrepancy_sup(const PointIndex& idx, double m, double R,
                       long long n_samples, std::uint64_t seed);

// Least-squares fit of log sup_disc vs log R. Radii with sup_disc == 0 are
// excluded from the fit; all zero -> error.
DiscrepancyReport fit_exponent(const PointSet& P, double m,
                               const std::vector<double>& radii,
                               long long n_samples, std::uint64_t seed);

struct FluxInfo {
  double used_r_min = 0.0;
  bool nudged = false;
};

// int_{r_min}^{R} pi*(N(r) - m*pi*r^2)^2 / r dr with N(r) the ball count
// around the origin, integrated exactly piecewise between count jumps.
// Lower-bounds (1/2) int_{B_R \ B_{r_min}} |j|^2 for every admissible field,
// by Cauchy-Schwarz on each circle. r_min == 0 is accepted when no point
// sits at the origin.
double flux_lower_bound(const PointSet& P, double m, double R, double r_min,
                        FluxInfo* info = nullptr);

}  // namespace lab
