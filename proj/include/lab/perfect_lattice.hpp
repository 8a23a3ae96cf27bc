#pragma once

#include <utility>
#include <vector>

#include "lab/geometry.hpp"

namespace lab {

struct LatticeBasis {
  Vec2 u{1, 0};
  Vec2 v{0, 1};

  double covolume() const { return std::abs(u.cross(v)); }
  LatticeBasis normalized() const;
  // Lagrange-Gauss reduction: returns a basis of the same lattice with
  // |u| <= |v| and |u.v| <= |u|^2 / 2.
  LatticeBasis reduced() const;
};

// Dual basis with <u_i, u*_j> = delta_ij; dual covolume = 1/covolume.
LatticeBasis dual_lattice(const LatticeBasis& b);

// Unit-covolume basis for the modular parameter tau = a + i b (b > 0).
LatticeBasis tau_basis(double a, double b);
LatticeBasis square_basis();
LatticeBasis triangular_basis();

// Robin constant gamma(L, m) = lim_{x->0} (V(x) + log|x|) of the L-periodic
// field V solving -div(grad V) = 2 pi (sum_{k in L} delta_k - m) with
// m = 1/covolume(L), evaluated by Ewald splitting to absolute accuracy tol.
double lattice_robin_constant(const LatticeBasis& b, double tol,
                              double split = 0.0);

// W of a unit-covolume lattice (background m = 1): pi * gamma(L).
double perfect_W_ewald(const LatticeBasis& b, double tol);

// Brute-force oracle: Gaussian-damped dual sums extrapolated in the damping,
// then Richardson-extrapolated in |x| -> 0 along the given offsets
// (|x| strictly decreasing). Independent code path from the Ewald route.
double perfect_W_extrapolate(const LatticeBasis& b,
                             const std::vector<Vec2>& x_list);

// Scaling identity W_m(j) = m (W_1(j') - (pi/2) log m): lhs from perfect_W
// on the unit lattice, rhs re-derived from the scaled lattice b/sqrt(m) at
// background m. Both sides returned for comparison.
std::pair<double, double> scaled_energy_check(const LatticeBasis& b, double m,
                                              double tol = 1e-10);

}  // namespace lab
