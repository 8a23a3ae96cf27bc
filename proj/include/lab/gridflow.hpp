#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "lab/pointset.hpp"

namespace lab {

// Inclusive box of block indices.
struct BlockBox {
  IVec2 lo{0, 0};
  IVec2 hi{-1, -1};

  std::int64_t width() const { return hi.x - lo.x + 1; }
  std::int64_t height() const { return hi.y - lo.y + 1; }
  bool contains(IVec2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  bool on_rim(IVec2 p) const {
    return p.x == lo.x || p.x == hi.x || p.y == lo.y || p.y == hi.y;
  }
  std::int64_t count() const { return width() * height(); }
};

// Dense integer field over a block box.
struct BlockField {
  BlockBox box;
  std::vector<std::int64_t> data;

  explicit BlockField(BlockBox b = {}) : box(b) {
    if (b.hi.x >= b.lo.x && b.hi.y >= b.lo.y)
      data.assign(static_cast<std::size_t>(b.count()), 0);
  }
  std::int64_t& at(IVec2 p) {
    return data[static_cast<std::size_t>((p.y - box.lo.y) * box.width() +
                                         (p.x - box.lo.x))];
  }
  std::int64_t at(IVec2 p) const {
    return data[static_cast<std::size_t>((p.y - box.lo.y) * box.width() +
                                         (p.x - box.lo.x))];
  }
};

// Antisymmetric edge function on the grid graph. Values are stored once per
// undirected edge in the +x / +y orientation; edges crossing the window rim
// (one endpoint in a 1-block halo) are included.
class OneForm {
 public:
  explicit OneForm(BlockBox window = {});

  const BlockBox& window() const { return win_; }

  // phi(p, q) for neighbors p, q (||p-q|| = 1). Antisymmetry is by storage.
  double value(IVec2 p, IVec2 q) const { return static_cast<double>(ivalue(p, q)); }
  std::int64_t ivalue(IVec2 p, IVec2 q) const;
  void set(IVec2 p, IVec2 q, std::int64_t v);
  void add(IVec2 p, IVec2 q, std::int64_t v);

  // div(phi)(p) = sum over the 4 incident edges of phi(p, q).
  std::int64_t divergence_at(IVec2 p) const;

  // [phi] = (1/2) sum over directed edges |phi| = sum over undirected edges.
  std::int64_t total_variation() const;

  // <phi, psi> = (1/2) sum over directed edges phi*psi.
  std::int64_t inner(const OneForm& other) const;

  std::int64_t max_abs() const;

  // Nonzero undirected edges as (p, q, value) with q = p + e_x or p + e_y.
  std::vector<std::tuple<IVec2, IVec2, std::int64_t>> nonzero_edges() const;

 private:
  BlockBox win_;
  std::int64_t nx_ = 0, ny_ = 0;  // node grid dims including halo
  std::vector<std::int64_t> right_, up_;
  std::size_t ridx(IVec2 p) const;  // edge p -> p+ex
  std::size_t uidx(IVec2 p) const;  // edge p -> p+ey
  bool node_in_halo(IVec2 p) const;
  friend OneForm gradient_form(const BlockField& f);
};

// Exact gradient 1-form of a finitely supported integer function.
OneForm gradient_form(const BlockField& f);

// Perimeter = number of directed boundary edges of the block set
// (mask != 0 marks membership; blocks outside the field count as absent).
std::int64_t perimeter(const BlockField& mask);

// Coarea left-hand side: [grad f] for f >= 0.
std::int64_t coarea_total_variation(const BlockField& f);

// Per-block deficit of Lambda = Z^2 \ A: mu(p) = #(A in K^N_p) with
// K^N_p = [kN,(k+1)N) x [lN,(l+1)N). Every block must lie fully inside the
// point window of A.
BlockField mu_blocks(const PointSet& A, int N, const BlockBox& window);

struct BoundedFlowResult {
  OneForm phi;
  std::int64_t bottleneck = 0;  // minimal feasible ||phi||_inf
};

// Integer 1-form with -div(phi) = mu exactly on interior blocks, excess
// exiting through the window rim. Among integral feasible flows the sup-norm
// bottleneck is minimized by binary search + max-flow feasibility.
BoundedFlowResult bounded_flow(const BlockField& mu);

// Transport table n_{p->q}: how many points of Lambda in K^N_p map to slots
// of Z^2 in K^N_q. Nonzero only for q = p or neighbors.
struct TransportTable {
  BlockBox window;
  int N = 0;
  BlockField stay;                  // n_{p->p}
  OneForm outflow;                  // n_{p->q} = max(phi(p,q), 0) on edges
  std::int64_t n_to(IVec2 p, IVec2 q) const;
};

// Builds and validates the table (row sums = block populations, interior
// column sums = N^2, all entries >= 0). Throws validation_error with
// "N too small" when n_{p->p} would go negative, defect_error on broken
// internal identities.
TransportTable block_transport(const PointSet& Lambda, const OneForm& phi,
                               int N);

struct Bijection {
  std::vector<IVec2> from;
  std::vector<IVec2> to;
  double max_displacement = 0.0;
  BlockBox interior;  // blocks where slot coverage is verified exact
};

// Explicit point-to-slot mapping realizing the transport table. Points and
// slots are matched in lexicographic order inside each receiving block.
Bijection build_bijection(const PointSet& Lambda, const TransportTable& table);

// 1-D flow on the edges (k, k+1) of Z. Outside the stored range the flow is
// constant on each side (the prefix construction ships mass to infinity), so
// the whole infinite object is represented exactly.
struct PrefixFlow1D {
  std::map<std::int64_t, std::int64_t> edges;  // key k: edge (k, k+1)
  std::int64_t left_value = 0;   // every edge left of the stored range
  std::int64_t right_value = 0;  // every edge right of the stored range

  std::int64_t value(std::int64_t k) const {
    auto it = edges.find(k);
    if (it != edges.end()) return it->second;
    if (!edges.empty() && k < edges.begin()->first) return left_value;
    if (!edges.empty() && k > edges.rbegin()->first) return right_value;
    return edges.empty() ? left_value : 0;
  }
  // div(phi)(p) = phi(p, p+1) - phi(p-1, p).
  std::int64_t div_at(std::int64_t p) const { return value(p) - value(p - 1); }
  std::int64_t max_abs() const;
};

// Prefix-sum flow with -div(phi) = mu exactly on all of Z:
// edge (k,k+1) carries 0 for k = 0, -sum_{i=1..k} mu(i) for k >= 1, and
// sum_{i=k+1..0} mu(i) for k < 0.
PrefixFlow1D prefix_flow_1d(const std::map<std::int64_t, std::int64_t>& mu);

}  // namespace lab
