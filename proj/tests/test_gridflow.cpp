#include <cmath>
#include <cstdint>
#include <map>

#include "doctest.h"
#include "lab/errors.hpp"
#include "lab/gridflow.hpp"
#include "lab/pointset.hpp"
#include "lab/sampling.hpp"

using namespace lab;

namespace {

BlockField random_field(BlockBox box, std::uint64_t& rng, int lo, int hi) {
  BlockField f(box);
  for (auto& v : f.data)
    v = lo + static_cast<std::int64_t>(splitmix64(rng) %
                                       static_cast<std::uint64_t>(hi - lo + 1));
  return f;
}

OneForm random_form(BlockBox box, std::uint64_t& rng, int amp) {
  OneForm phi(box);
  for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
    for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x) {
      std::int64_t a =
          static_cast<std::int64_t>(splitmix64(rng) % (2 * amp + 1)) - amp;
      std::int64_t b =
          static_cast<std::int64_t>(splitmix64(rng) % (2 * amp + 1)) - amp;
      phi.set({x, y}, {x + 1, y}, a);
      phi.set({x, y}, {x, y + 1}, b);
    }
  return phi;
}

// Sum over blocks of f * div(phi), over the support box plus halo.
std::int64_t sum_f_div(const BlockField& f, const OneForm& phi) {
  std::int64_t s = 0;
  for (std::int64_t y = f.box.lo.y; y <= f.box.hi.y; ++y)
    for (std::int64_t x = f.box.lo.x; x <= f.box.hi.x; ++x)
      s += f.at({x, y}) * phi.divergence_at({x, y});
  return s;
}

}  // namespace

TEST_CASE("gradient_form basics") {
  BlockBox box{{0, 0}, {4, 4}};
  BlockField zero(box);
  CHECK(gradient_form(zero).total_variation() == 0);

  BlockField ind(box);
  ind.at({2, 2}) = 1;
  OneForm g = gradient_form(ind);
  CHECK(g.ivalue({2, 2}, {3, 2}) == -1);
  CHECK(g.ivalue({1, 2}, {2, 2}) == 1);
  CHECK(g.total_variation() == 4);

  // Loop integral of a gradient around a unit square is zero.
  std::int64_t loop = g.ivalue({1, 1}, {2, 1}) + g.ivalue({2, 1}, {2, 2}) +
                      g.ivalue({2, 2}, {1, 2}) + g.ivalue({1, 2}, {1, 1});
  CHECK(loop == 0);
}

TEST_CASE("divergence of an elementary form") {
  BlockBox box{{0, 0}, {3, 3}};
  OneForm alpha(box);
  alpha.set({1, 1}, {2, 1}, 1);
  CHECK(alpha.divergence_at({1, 1}) == 1);
  CHECK(alpha.divergence_at({2, 1}) == -1);
  CHECK(alpha.divergence_at({0, 0}) == 0);
}

TEST_CASE("perimeter oracles") {
  BlockBox box{{-2, -2}, {4, 4}};
  BlockField one(box);
  one.at({0, 0}) = 1;
  CHECK(perimeter(one) == 4);

  BlockField sq(box);
  sq.at({0, 0}) = sq.at({1, 0}) = sq.at({0, 1}) = sq.at({1, 1}) = 1;
  CHECK(perimeter(sq) == 8);

  // Coarea for an indicator: [grad 1_B] = per(B) for a rectangle.
  BlockField rect(box);
  for (std::int64_t x = -1; x <= 2; ++x)
    for (std::int64_t y = 0; y <= 1; ++y) rect.at({x, y}) = 1;
  CHECK(coarea_total_variation(rect) == perimeter(rect));
}

TEST_CASE("Stokes identity holds exactly on random pairs") {
  std::uint64_t rng = 2024;
  for (int trial = 0; trial < 50; ++trial) {
    BlockBox box{{0, 0}, {15, 15}};
    BlockField f = random_field(box, rng, -5, 5);
    OneForm phi = random_form(box, rng, 9);
    OneForm gf = gradient_form(f);
    // <phi, grad f> = -sum f div(phi)
    CHECK(phi.inner(gf) == -sum_f_div(f, phi));
  }
}

TEST_CASE("coarea identity holds exactly for nonnegative f") {
  std::uint64_t rng = 99;
  for (int trial = 0; trial < 50; ++trial) {
    BlockBox box{{0, 0}, {15, 15}};
    BlockField f = random_field(box, rng, 0, 6);
    std::int64_t lhs = coarea_total_variation(f);
    std::int64_t rhs = 0;
    for (std::int64_t t = 0; t < 6; ++t) {
      BlockField level(box);
      for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
        for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x)
          level.at({x, y}) = f.at({x, y}) > t ? 1 : 0;
      rhs += perimeter(level);
    }
    CHECK(lhs == rhs);
  }
}

TEST_CASE("Poincare: closed forms are reconstructed as gradients exactly") {
  std::uint64_t rng = 7;
  for (int trial = 0; trial < 20; ++trial) {
    BlockBox box{{0, 0}, {11, 11}};
    BlockField f = random_field(box, rng, -7, 7);
    OneForm phi = gradient_form(f);
    // Path-integrate from the anchor along rows/columns.
    BlockField rec(box);
    for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
      for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x) {
        std::int64_t acc = 0;
        for (std::int64_t t = box.lo.y; t < y; ++t)
          acc += phi.ivalue({box.lo.x, t}, {box.lo.x, t + 1});
        for (std::int64_t t = box.lo.x; t < x; ++t)
          acc += phi.ivalue({t, y}, {t + 1, y});
        rec.at({x, y}) = acc;
      }
    // Reconstruction differs from f by the anchor value.
    std::int64_t c = f.at(box.lo) - rec.at(box.lo);
    for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
      for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x)
        CHECK(rec.at({x, y}) + c == f.at({x, y}));
    // Re-differentiating returns the form on interior edges.
    OneForm phi2 = gradient_form(rec);
    for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
      for (std::int64_t x = box.lo.x; x < box.hi.x; ++x)
        CHECK(phi2.ivalue({x, y}, {x + 1, y}) == phi.ivalue({x, y}, {x + 1, y}));
  }
}

TEST_CASE("mu_blocks oracles") {
  PointSet empty;
  empty.window = Box({0, 0}, {20, 20});
  empty.ipoints.emplace();
  BlockField mu0 = mu_blocks(empty, 3, BlockBox{{-2, -2}, {2, 2}});
  for (auto v : mu0.data) CHECK(v == 0);

  PointSet a;
  a.window = Box({0, 0}, {20, 20});
  a.points = {{0, 0}};
  a.weights = {1.0};
  BlockField mu1 = mu_blocks(a, 3, BlockBox{{-2, -2}, {2, 2}});
  CHECK(mu1.at({0, 0}) == 1);
  std::int64_t total = 0;
  for (auto v : mu1.data) total += v;
  CHECK(total == 1);

  // Column {0} x [0, 3N): mu = N on three stacked blocks.
  PointSet col;
  col.window = Box({0, 0}, {20, 20});
  for (int y = 0; y < 9; ++y) col.points.push_back({0, static_cast<double>(y)});
  col.weights.assign(col.points.size(), 1.0);
  BlockField mu2 = mu_blocks(col, 3, BlockBox{{-2, -2}, {2, 2}});
  CHECK(mu2.at({0, 0}) == 3);
  CHECK(mu2.at({0, 1}) == 3);
  CHECK(mu2.at({0, 2}) == 3);

  CHECK_THROWS_AS(mu_blocks(a, 3, BlockBox{{-10, -10}, {10, 10}}),
                  validation_error);
}

TEST_CASE("bounded_flow: zero measure gives the zero form") {
  BlockBox box{{0, 0}, {7, 7}};
  BlockField mu(box);
  auto res = bounded_flow(mu);
  CHECK(res.bottleneck == 0);
  CHECK(res.phi.max_abs() == 0);
}

TEST_CASE("bounded_flow: single unit source needs bottleneck 1") {
  BlockBox box{{0, 0}, {6, 6}};
  BlockField mu(box);
  mu.at({3, 3}) = 1;
  auto res = bounded_flow(mu);
  CHECK(res.bottleneck == 1);
  CHECK(res.phi.max_abs() == 1);
  // -div phi = mu on interior blocks.
  for (std::int64_t y = 1; y <= 5; ++y)
    for (std::int64_t x = 1; x <= 5; ++x)
      CHECK(-res.phi.divergence_at({x, y}) == mu.at({x, y}));
}

TEST_CASE("bounded_flow solves -div phi = mu for a row defect") {
  // A = a full row of Z^2; window 16x16 blocks, N = 4.
  const int N = 4, W = 16;
  BlockBox box{{-W / 2, -W / 2}, {W / 2 - 1, W / 2 - 1}};
  double hw = W / 2.0 * N;
  PointSet A;
  A.window = Box({0, 0}, {hw, hw});
  for (int x = -static_cast<int>(hw); x <= static_cast<int>(hw) - 1; ++x)
    A.points.push_back({static_cast<double>(x), 0.0});
  A.weights.assign(A.points.size(), 1.0);

  BlockField mu = mu_blocks(A, N, box);
  auto res = bounded_flow(mu);
  for (std::int64_t y = box.lo.y + 1; y < box.hi.y; ++y)
    for (std::int64_t x = box.lo.x + 1; x < box.hi.x; ++x)
      CHECK(-res.phi.divergence_at({x, y}) == mu.at({x, y}));
  // The defect line density is N per block; a split up/down flow achieves
  // ceil(N/2), and the bottleneck can be no larger than N.
  CHECK(res.bottleneck >= (N + 1) / 2);
  CHECK(res.bottleneck <= N);
}

TEST_CASE("block_transport: A empty gives the diagonal table") {
  const int N = 3, W = 6;
  BlockBox box{{-W / 2, -W / 2}, {W / 2 - 1, W / 2 - 1}};
  double hw = W / 2.0 * N;
  PointSet L = gen_named(NamedKind::Z2, Box({0, 0}, {hw, hw}));
  OneForm zero(box);
  TransportTable t = block_transport(L, zero, N);
  CHECK(t.n_to({0, 0}, {0, 0}) == N * N);
  CHECK(t.n_to({0, 0}, {1, 0}) == 0);
}

TEST_CASE("transport + bijection for a single defect") {
  const int N = 3, W = 8;
  BlockBox box{{-W / 2, -W / 2}, {W / 2 - 1, W / 2 - 1}};
  double hw = W / 2.0 * N + 0.5;
  PointSet A;
  A.window = Box({0, 0}, {hw, hw});
  A.points = {{0, 0}};
  A.weights = {1.0};
  PointSet L = gen_named(NamedKind::Z2_minus_A, Box({0, 0}, {hw, hw}), &A);

  BlockField mu = mu_blocks(A, N, box);
  auto res = bounded_flow(mu);
  TransportTable t = block_transport(L, res.phi, N);
  Bijection bij = build_bijection(L, t);
  CHECK(bij.max_displacement <= 2.0 * std::sqrt(2.0) * N);
  CHECK(bij.from.size() == bij.to.size());

  // Injectivity of targets and exact coverage of deep-interior slots.
  std::map<std::pair<std::int64_t, std::int64_t>, int> hit;
  for (auto& q : bij.to) ++hit[{q.x, q.y}];
  for (auto& [k, v] : hit) CHECK(v == 1);
  int covered = 0, expected = 0;
  for (std::int64_t sx = (box.lo.x + 1) * N; sx < (box.hi.x) * N; ++sx)
    for (std::int64_t sy = (box.lo.y + 1) * N; sy < (box.hi.y) * N; ++sy) {
      ++expected;
      if (hit.count({sx, sy})) ++covered;
    }
  CHECK(covered == expected);
}

TEST_CASE("block_transport rejects N too small") {
  // Force a flow with large values against a tiny N by hand.
  const int N = 1, W = 6;
  BlockBox box{{-W / 2, -W / 2}, {W / 2 - 1, W / 2 - 1}};
  PointSet L = gen_named(NamedKind::Z2, Box({0, 0}, {3.5, 3.5}));
  OneForm phi(box);
  // Circulation (divergence-free) with big values: -div phi = 0 = mu since
  // there are no defects, but n_{p->p} = 1 - (outgoing positives) < 0.
  phi.set({0, 0}, {1, 0}, 3);
  phi.set({1, 0}, {1, 1}, 3);
  phi.set({1, 1}, {0, 1}, 3);
  phi.set({0, 1}, {0, 0}, 3);
  CHECK_THROWS_WITH_AS(block_transport(L, phi, N),
                       doctest::Contains("N too small"), validation_error);
}

TEST_CASE("prefix_flow_1d: delta at 0") {
  std::map<std::int64_t, std::int64_t> mu{{0, 1}};
  PrefixFlow1D phi = prefix_flow_1d(mu);
  CHECK(phi.value(0) == 0);
  CHECK(phi.value(5) == 0);
  CHECK(phi.value(-1) == 1);
  CHECK(phi.value(-7) == 1);
  for (std::int64_t p = -10; p <= 10; ++p)
    CHECK(-phi.div_at(p) == (p == 0 ? 1 : 0));
}

TEST_CASE("prefix_flow_1d: -div = mu exactly on random measures") {
  std::uint64_t rng = 31337;
  for (int trial = 0; trial < 20; ++trial) {
    std::map<std::int64_t, std::int64_t> mu;
    for (int i = 0; i < 12; ++i) {
      std::int64_t k = static_cast<std::int64_t>(splitmix64(rng) % 41) - 20;
      mu[k] += static_cast<std::int64_t>(splitmix64(rng) % 5);
    }
    PrefixFlow1D phi = prefix_flow_1d(mu);
    for (std::int64_t p = -25; p <= 25; ++p) {
      auto it = mu.find(p);
      std::int64_t want = it == mu.end() ? 0 : it->second;
      CHECK(-phi.div_at(p) == want);
    }
  }
}

TEST_CASE("prefix_flow_1d: bounded discrepancy gives bounded flow") {
  // Lambda_1 = Z with every 4th point removed: block deficits mu(i) are 0/1
  // bounded, and the prefix flow stays uniformly small.
  const int N = 4;
  std::map<std::int64_t, std::int64_t> mu;
  for (std::int64_t i = -50; i <= 50; ++i) {
    // one removed point per block of length N => mu = 1
    mu[i] = 1;
  }
  PrefixFlow1D phi = prefix_flow_1d(mu);
  (void)N;
  // Flow grows linearly here (deficit has positive density) -- use instead a
  // zero-mean alternating measure to model bounded square-count discrepancy.
  std::map<std::int64_t, std::int64_t> alt;
  for (std::int64_t i = -50; i <= 50; ++i) alt[i] = (i % 2 == 0) ? 1 : -1;
  PrefixFlow1D phi2 = prefix_flow_1d(alt);
  CHECK(phi2.max_abs() <= 2);
}

TEST_CASE("auxiliary isoperimetric bound on connected block sets") {
  // A = full row: ball counts satisfy #(A in B(x,R)) <= 3R, so C = 3 works;
  // check mu_N(B) <= 4 C N per(B) on random connected block animals.
  const int N = 5;
  double hw = 60;
  PointSet A;
  A.window = Box({0, 0}, {hw, hw});
  for (int x = -59; x <= 59; ++x) A.points.push_back({(double)x, 0.0});
  A.weights.assign(A.points.size(), 1.0);
  BlockBox box{{-10, -10}, {9, 9}};
  BlockField mu = mu_blocks(A, N, box);

  std::uint64_t rng = 4242;
  for (int trial = 0; trial < 30; ++trial) {
    // Random connected animal grown from a random seed block.
    BlockField mask(box);
    IVec2 cur{static_cast<std::int64_t>(splitmix64(rng) % 20) - 10,
              static_cast<std::int64_t>(splitmix64(rng) % 20) - 10};
    mask.at(cur) = 1;
    for (int step = 0; step < 40; ++step) {
      const IVec2 dirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      IVec2 d = dirs[splitmix64(rng) % 4];
      IVec2 nxt{cur.x + d.x, cur.y + d.y};
      if (box.contains(nxt)) {
        cur = nxt;
        mask.at(cur) = 1;
      }
    }
    std::int64_t muB = 0;
    for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
      for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x)
        if (mask.at({x, y})) muB += mu.at({x, y});
    CHECK(muB <= 4 * 3 * N * perimeter(mask));
  }
}
