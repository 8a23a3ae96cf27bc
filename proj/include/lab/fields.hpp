#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lab/pointset.hpp"

namespace lab {

// Vector fields j in this module are literal gradients solving
//   -div(j) = 2 pi (sum_p alpha_p delta_p - m),
// so away from singular points div(j) = 2 pi m, and near a registered point
//   j(x) = -alpha_p (x-p)/|x-p|^2 + bounded.
// Complex derivatives f are identified with plane vectors via
// (Re f, -Im f) (the gradient of Re g for holomorphic g with g' = f).
// The subtracted monopole used by the energy module:
inline Vec2 monopole(Vec2 x, Vec2 p, double alpha) {
  Vec2 d = x - p;
  return d * (-alpha / d.norm2());
}

struct Singularity {
  Vec2 p;
  double alpha = 1.0;
};

struct SingularField {
  std::function<Vec2(Vec2)> evaluate;
  std::vector<Singularity> singular_points;
  double background = 0.0;  // m
  std::string label;
  double tail_error = 0.0;  // guaranteed sup-norm truncation error
  Box window;               // region where evaluate + registry are valid
};

// grad of V1(x) = -log|sin(pi x)| (period-1 field with unit charges on Z).
// Throws on the singular set Z x {0}.
Vec2 field_V1(Vec2 x);
SingularField make_field_V1(const Box& window);

// grad of H1 = -log|H| for the Weierstrass product with zeros at 1,2,3,...
// |grad H1(x)| = |sum_{k>=1} x/(k(k-x))|; truncation at K = ceil(2|x|)+T
// with the analytic digamma tail, absolute accuracy << tol.
Vec2 field_H1(Vec2 x, double tol = 1e-10);
SingularField make_field_H1(const Box& window, double tol = 1e-10);

// Complex value f(z) = sum_{k>=1} z/(k(k-z)) as a pair (Re, Im); the field
// vector is (Re f, -Im f). Exposed for the pointwise-bound checks.
Vec2 h1_sum(Vec2 z, double tol = 1e-10);

// Multiscale field: grad U^1 + sum_{k=2..K} grad U^k with R_k = 2^{k-1};
// U^1 is the radial Neumann solution on B(p,1), the higher scales use the
// piecewise profile V'(t) = -3t (t<=1/2), t - 1/t (1/2<t<=1).
struct MultiscaleField {
  SingularField field;
  std::vector<double> scale_sup;  // measured ||grad U^k||_inf, k = 1..K
};
MultiscaleField make_field_multiscale(const PointSet& P, double m, int K);

// Single-scale evaluator (k >= 1) and its measured sup over a sample grid
// near the window center.
Vec2 multiscale_scale_at(const PointIndex& idx, int k, Vec2 x);
double measure_scale_sup(const PointSet& P, int k, int grid_n = 48);

// Bounded-displacement relocation field: grad V (Z^2-periodic, background 1,
// Ewald-evaluated to tol) plus disc-Neumann dipole corrections grad U_p for
// every p with Phi(p) != p. Phi must be a bijection onto Z^2 over the
// window interior.
SingularField make_field_move(const PointSet& P,
                              const std::map<IVec2, IVec2>& Phi, double tol);

// grad of the Z^2-periodic potential with background 1 (Ewald).
Vec2 ewald_grad_V(Vec2 x, double tol = 1e-12);

// Pointwise sum/difference; registries merge with signed coefficients
// (coinciding points add, zero-coefficient points drop), backgrounds add.
SingularField field_combine(const SingularField& f, const SingularField& g,
                            int sign);

}  // namespace lab
