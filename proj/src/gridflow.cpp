#include "lab/gridflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "lab/errors.hpp"

namespace lab {

// ---------------------------------------------------------------------------
// OneForm storage: node grid of (window + 1-block halo); right/up edge arrays.

OneForm::OneForm(BlockBox window) : win_(window) {
  if (window.hi.x < window.lo.x || window.hi.y < window.lo.y) return;
  nx_ = window.width() + 2;
  ny_ = window.height() + 2;
  right_.assign(static_cast<std::size_t>(nx_ * ny_), 0);
  up_.assign(static_cast<std::size_t>(nx_ * ny_), 0);
}

bool OneForm::node_in_halo(IVec2 p) const {
  return p.x >= win_.lo.x - 1 && p.x <= win_.hi.x + 1 && p.y >= win_.lo.y - 1 &&
         p.y <= win_.hi.y + 1;
}

std::size_t OneForm::ridx(IVec2 p) const {
  return static_cast<std::size_t>((p.y - (win_.lo.y - 1)) * nx_ +
                                  (p.x - (win_.lo.x - 1)));
}
std::size_t OneForm::uidx(IVec2 p) const { return ridx(p); }

std::int64_t OneForm::ivalue(IVec2 p, IVec2 q) const {
  std::int64_t dx = q.x - p.x, dy = q.y - p.y;
  if (std::abs(dx) + std::abs(dy) != 1)
    throw validation_error("OneForm: (p,q) is not a grid edge");
  if (dx == 1) return node_in_halo(p) && node_in_halo(q) ? right_[ridx(p)] : 0;
  if (dx == -1) return node_in_halo(p) && node_in_halo(q) ? -right_[ridx(q)] : 0;
  if (dy == 1) return node_in_halo(p) && node_in_halo(q) ? up_[uidx(p)] : 0;
  return node_in_halo(p) && node_in_halo(q) ? -up_[uidx(q)] : 0;
}

void OneForm::set(IVec2 p, IVec2 q, std::int64_t v) {
  std::int64_t dx = q.x - p.x, dy = q.y - p.y;
  if (std::abs(dx) + std::abs(dy) != 1)
    throw validation_error("OneForm: (p,q) is not a grid edge");
  IVec2 base = p;
  bool flip = false;
  bool horizontal = (dy == 0);
  if (dx == -1 || dy == -1) {
    base = q;
    flip = true;
  }
  if (!node_in_halo(base) || !node_in_halo({base.x + (horizontal ? 1 : 0),
                                            base.y + (horizontal ? 0 : 1)}))
    throw validation_error("OneForm: edge outside the window halo");
  std::int64_t stored = flip ? -v : v;
  if (horizontal)
    right_[ridx(base)] = stored;
  else
    up_[uidx(base)] = stored;
}

void OneForm::add(IVec2 p, IVec2 q, std::int64_t v) {
  set(p, q, ivalue(p, q) + v);
}

std::int64_t OneForm::divergence_at(IVec2 p) const {
  std::int64_t s = 0;
  s += ivalue(p, {p.x + 1, p.y});
  s += ivalue(p, {p.x - 1, p.y});
  s += ivalue(p, {p.x, p.y + 1});
  s += ivalue(p, {p.x, p.y - 1});
  return s;
}

std::int64_t OneForm::total_variation() const {
  std::int64_t s = 0;
  for (std::int64_t v : right_) s += std::abs(v);
  for (std::int64_t v : up_) s += std::abs(v);
  return s;
}

std::int64_t OneForm::inner(const OneForm& other) const {
  if (win_.lo.x != other.win_.lo.x || win_.lo.y != other.win_.lo.y ||
      win_.hi.x != other.win_.hi.x || win_.hi.y != other.win_.hi.y)
    throw validation_error("OneForm::inner: window mismatch");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < right_.size(); ++i) s += right_[i] * other.right_[i];
  for (std::size_t i = 0; i < up_.size(); ++i) s += up_[i] * other.up_[i];
  return s;
}

std::int64_t OneForm::max_abs() const {
  std::int64_t m = 0;
  for (std::int64_t v : right_) m = std::max(m, std::abs(v));
  for (std::int64_t v : up_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<std::tuple<IVec2, IVec2, std::int64_t>> OneForm::nonzero_edges()
    const {
  std::vector<std::tuple<IVec2, IVec2, std::int64_t>> out;
  for (std::int64_t y = win_.lo.y - 1; y <= win_.hi.y + 1; ++y)
    for (std::int64_t x = win_.lo.x - 1; x <= win_.hi.x + 1; ++x) {
      IVec2 p{x, y};
      if (x + 1 <= win_.hi.x + 1) {
        std::int64_t v = right_[ridx(p)];
        if (v != 0) out.emplace_back(p, IVec2{x + 1, y}, v);
      }
      if (y + 1 <= win_.hi.y + 1) {
        std::int64_t v = up_[uidx(p)];
        if (v != 0) out.emplace_back(p, IVec2{x, y + 1}, v);
      }
    }
  return out;
}

OneForm gradient_form(const BlockField& f) {
  OneForm g(f.box);
  for (std::int64_t y = f.box.lo.y; y <= f.box.hi.y; ++y)
    for (std::int64_t x = f.box.lo.x; x <= f.box.hi.x; ++x) {
      IVec2 p{x, y};
      std::int64_t fp = f.at(p);
      // All four edges incident to support contribute; neighbors outside the
      // box carry f = 0.
      auto fval = [&](IVec2 q) {
        return f.box.contains(q) ? f.at(q) : std::int64_t(0);
      };
      g.set(p, {x + 1, y}, fval({x + 1, y}) - fp);
      g.set({x - 1, y}, p, fp - fval({x - 1, y}));
      g.set(p, {x, y + 1}, fval({x, y + 1}) - fp);
      g.set({x, y - 1}, p, fp - fval({x, y - 1}));
    }
  return g;
}

std::int64_t perimeter(const BlockField& mask) {
  std::int64_t per = 0;
  auto inside = [&](IVec2 q) { return mask.box.contains(q) && mask.at(q) != 0; };
  for (std::int64_t y = mask.box.lo.y; y <= mask.box.hi.y; ++y)
    for (std::int64_t x = mask.box.lo.x; x <= mask.box.hi.x; ++x) {
      IVec2 p{x, y};
      if (!inside(p)) continue;
      const IVec2 nb[4] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
      for (IVec2 q : nb)
        if (!inside(q)) ++per;
    }
  return per;
}

std::int64_t coarea_total_variation(const BlockField& f) {
  OneForm g = gradient_form(f);
  return g.total_variation();
}

BlockField mu_blocks(const PointSet& A, int N, const BlockBox& window) {
  if (N < 1) throw validation_error("mu_blocks: N must be >= 1");
  // Every block must be fully covered by A's point window.
  double bx0 = static_cast<double>(window.lo.x) * N;
  double bx1 = static_cast<double>(window.hi.x + 1) * N - 1;
  double by0 = static_cast<double>(window.lo.y) * N;
  double by1 = static_cast<double>(window.hi.y + 1) * N - 1;
  const Box& w = A.window;
  if (bx0 < w.xmin() || bx1 > w.xmax() || by0 < w.ymin() || by1 > w.ymax())
    throw validation_error("mu_blocks: blocks not fully inside the point window");

  BlockField mu(window);
  for (const IVec2& a : as_integer_points(A)) {
    std::int64_t k = a.x >= 0 ? a.x / N : -((-a.x + N - 1) / N);
    std::int64_t l = a.y >= 0 ? a.y / N : -((-a.y + N - 1) / N);
    IVec2 blk{k, l};
    if (window.contains(blk)) ++mu.at(blk);
  }
  return mu;
}

// ---------------------------------------------------------------------------
// Dinic max-flow on the block graph, used for bottleneck feasibility.

namespace {

struct Dinic {
  struct Arc {
    int to;
    std::int64_t cap;
    int rev;
  };
  std::vector<std::vector<Arc>> g;
  std::vector<int> level, iter;

  explicit Dinic(int n) : g(n), level(n), iter(n) {}

  void add_edge(int a, int b, std::int64_t cap_ab, std::int64_t cap_ba = 0) {
    g[a].push_back({b, cap_ab, static_cast<int>(g[b].size())});
    g[b].push_back({a, cap_ba, static_cast<int>(g[a].size()) - 1});
  }

  bool bfs(int s, int t) {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    level[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const Arc& a : g[v])
        if (a.cap > 0 && level[a.to] < 0) {
          level[a.to] = level[v] + 1;
          q.push(a.to);
        }
    }
    return level[t] >= 0;
  }

  std::int64_t dfs(int v, int t, std::int64_t f) {
    if (v == t) return f;
    for (int& i = iter[v]; i < static_cast<int>(g[v].size()); ++i) {
      Arc& a = g[v][i];
      if (a.cap > 0 && level[v] < level[a.to]) {
        std::int64_t d = dfs(a.to, t, std::min(f, a.cap));
        if (d > 0) {
          a.cap -= d;
          g[a.to][a.rev].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  std::int64_t max_flow(int s, int t) {
    std::int64_t flow = 0;
    while (bfs(s, t)) {
      std::fill(iter.begin(), iter.end(), 0);
      std::int64_t f;
      while ((f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) > 0)
        flow += f;
    }
    return flow;
  }
};

}  // namespace

BoundedFlowResult bounded_flow(const BlockField& mu) {
  const BlockBox& box = mu.box;
  const std::int64_t W = box.width(), H = box.height();
  std::int64_t total = 0;
  for (std::int64_t v : mu.data) {
    if (v < 0) throw validation_error("bounded_flow: mu must be nonnegative");
    total += v;
  }
  if (total == 0) return {OneForm(box), 0};

  auto node = [&](IVec2 p) {
    return static_cast<int>((p.y - box.lo.y) * W + (p.x - box.lo.x));
  };
  const int n_blocks = static_cast<int>(W * H);
  const int S = n_blocks, T = n_blocks + 1;

  struct EdgeRef {
    IVec2 p, q;
    int node_idx, arc_idx;
  };

  // Feasibility at cap c: can all supply reach the rim sink when every grid
  // edge carries at most c in each direction and every rim edge leaving the
  // window carries at most c per outside edge?
  auto attempt = [&](std::int64_t c, OneForm* out) -> bool {
    Dinic din(n_blocks + 2);
    std::vector<EdgeRef> refs;
    for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
      for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x) {
        IVec2 p{x, y};
        if (mu.at(p) > 0) din.add_edge(S, node(p), mu.at(p));
        // interior grid edges (+x, +y), capacity c both ways
        IVec2 r{x + 1, y}, u{x, y + 1};
        if (box.contains(r)) {
          refs.push_back({p, r, node(p), static_cast<int>(din.g[node(p)].size())});
          din.add_edge(node(p), node(r), c, c);
        }
        if (box.contains(u)) {
          refs.push_back({p, u, node(p), static_cast<int>(din.g[node(p)].size())});
          din.add_edge(node(p), node(u), c, c);
        }
        // rim exits: one arc of capacity c per grid edge leaving the window
        int outside = 0;
        if (x == box.lo.x) ++outside;
        if (x == box.hi.x) ++outside;
        if (y == box.lo.y) ++outside;
        if (y == box.hi.y) ++outside;
        if (outside > 0) din.add_edge(node(p), T, c * outside);
      }
    std::int64_t f = din.max_flow(S, T);
    if (f < total) return false;
    if (out) {
      // phi = -(net transported mass): deficits attract flux.
      *out = OneForm(box);
      for (const EdgeRef& e : refs) {
        const Dinic::Arc& a = din.g[e.node_idx][e.arc_idx];
        // Both directions start at capacity c, so the residuals satisfy
        // cap_pq = c - f_pq + f_qp and cap_qp = c - f_qp + f_pq, giving the
        // net shipment f_pq - f_qp = (cap_qp - cap_pq) / 2.
        std::int64_t qcap = din.g[a.to][a.rev].cap;
        std::int64_t netflow = (qcap - a.cap) / 2;
        // phi carries flux toward the deficits: phi = -(shipped mass).
        out->set(e.p, e.q, -netflow);
      }
    }
    return true;
  };

  // Binary search the minimal feasible integer cap.
  std::int64_t lo = 0, hi = total;
  if (!attempt(hi, nullptr))
    throw defect_error("bounded_flow: infeasible at full capacity");
  while (lo < hi) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (attempt(mid, nullptr))
      hi = mid;
    else
      lo = mid + 1;
  }
  BoundedFlowResult res{OneForm(box), hi};
  if (!attempt(hi, &res.phi))
    throw defect_error("bounded_flow: feasibility lost at the optimum");
  return res;
}

// ---------------------------------------------------------------------------

std::int64_t TransportTable::n_to(IVec2 p, IVec2 q) const {
  if (p == q) return window.contains(p) ? stay.at(p) : 0;
  std::int64_t dx = std::abs(q.x - p.x), dy = std::abs(q.y - p.y);
  if (dx + dy != 1) return 0;
  return std::max<std::int64_t>(outflow.ivalue(p, q), 0);
}

namespace {

std::int64_t block_floor_div(std::int64_t a, int N) {
  return a >= 0 ? a / N : -((-a + N - 1) / N);
}

BlockField count_points_per_block(const PointSet& Lambda, int N,
                                  const BlockBox& window) {
  BlockField cnt(window);
  for (const IVec2& p : as_integer_points(Lambda)) {
    IVec2 blk{block_floor_div(p.x, N), block_floor_div(p.y, N)};
    if (window.contains(blk)) ++cnt.at(blk);
  }
  return cnt;
}

}  // namespace

TransportTable block_transport(const PointSet& Lambda, const OneForm& phi,
                               int N) {
  const BlockBox box = phi.window();
  TransportTable t;
  t.window = box;
  t.N = N;
  t.outflow = phi;
  t.stay = BlockField(box);

  // Blocks must be fully covered by Lambda's window, otherwise block
  // populations would be silently undercounted.
  const Box& w = Lambda.window;
  if (static_cast<double>(box.lo.x) * N < w.xmin() ||
      static_cast<double>(box.hi.x + 1) * N - 1 > w.xmax() ||
      static_cast<double>(box.lo.y) * N < w.ymin() ||
      static_cast<double>(box.hi.y + 1) * N - 1 > w.ymax())
    throw validation_error("block_transport: blocks exceed Lambda's window");

  BlockField pop = count_points_per_block(Lambda, N, box);

  // Validate -div phi = mu on interior blocks first.
  for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
    for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x) {
      IVec2 p{x, y};
      if (box.on_rim(p)) continue;
      std::int64_t mu = static_cast<std::int64_t>(N) * N - pop.at(p);
      if (-phi.divergence_at(p) != mu)
        throw validation_error(
            "block_transport: -div(phi) != mu_N on an interior block");
    }

  for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
    for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x) {
      IVec2 p{x, y};
      std::int64_t out = 0;
      const IVec2 nb[4] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (IVec2 q : nb) out += std::max<std::int64_t>(phi.ivalue(p, q), 0);
      std::int64_t self = pop.at(p) - out;
      if (self < 0)
        throw validation_error("block_transport: N too small for ||phi||_inf");
      t.stay.at(p) = self;
    }

  // Property 3: interior column sums equal N^2.
  for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
    for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x) {
      IVec2 q{x, y};
      if (box.on_rim(q)) continue;
      std::int64_t col = t.stay.at(q);
      const IVec2 nb[4] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (IVec2 p : nb) col += std::max<std::int64_t>(phi.ivalue(p, q), 0);
      if (col != static_cast<std::int64_t>(N) * N)
        throw defect_error("block_transport: interior column sum != N^2");
    }
  return t;
}

Bijection build_bijection(const PointSet& Lambda, const TransportTable& table) {
  const BlockBox& box = table.window;
  const int N = table.N;

  // Points grouped per block, sorted lexicographically.
  std::vector<std::vector<IVec2>> per_block(
      static_cast<std::size_t>(box.count()));
  auto bidx = [&](IVec2 blk) {
    return static_cast<std::size_t>((blk.y - box.lo.y) * box.width() +
                                    (blk.x - box.lo.x));
  };
  for (const IVec2& p : as_integer_points(Lambda)) {
    IVec2 blk{block_floor_div(p.x, N), block_floor_div(p.y, N)};
    if (box.contains(blk)) per_block[bidx(blk)].push_back(p);
  }
  for (auto& v : per_block) std::sort(v.begin(), v.end());

  // Incoming point lists per destination block.
  std::vector<std::vector<IVec2>> incoming(per_block.size());
  const IVec2 dirs[4] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};  // lex order
  for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
    for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x) {
      IVec2 p{x, y};
      const auto& pts = per_block[bidx(p)];
      std::size_t cursor = 0;
      for (IVec2 d : dirs) {
        IVec2 q{x + d.x, y + d.y};
        if (!box.contains(q)) continue;
        std::int64_t n = table.n_to(p, q);
        if (static_cast<std::int64_t>(pts.size() - cursor) < n)
          throw validation_error(
              "build_bijection: table demands more points than the block holds");
        for (std::int64_t i = 0; i < n; ++i)
          incoming[bidx(q)].push_back(pts[cursor++]);
      }
      // remainder stays home
      std::int64_t self = table.n_to(p, p);
      if (static_cast<std::int64_t>(pts.size()) - static_cast<std::int64_t>(cursor) !=
          self)
        throw validation_error(
            "build_bijection: table row does not match the block population");
      for (; cursor < pts.size(); ++cursor)
        incoming[bidx(p)].push_back(pts[cursor]);
    }

  Bijection bij;
  bij.interior = BlockBox{{box.lo.x + 1, box.lo.y + 1}, {box.hi.x - 1, box.hi.y - 1}};
  double maxdisp2 = 0.0;
  for (std::int64_t y = box.lo.y; y <= box.hi.y; ++y)
    for (std::int64_t x = box.lo.x; x <= box.hi.x; ++x) {
      IVec2 q{x, y};
      auto& pts = incoming[bidx(q)];
      std::sort(pts.begin(), pts.end());
      const std::int64_t n2 = static_cast<std::int64_t>(N) * N;
      if (!box.on_rim(q) && static_cast<std::int64_t>(pts.size()) != n2)
        throw defect_error("build_bijection: interior block not exactly filled");
      if (static_cast<std::int64_t>(pts.size()) > n2)
        throw defect_error("build_bijection: block over-filled");
      // Slots of K^N_q in lexicographic order.
      std::size_t i = 0;
      for (std::int64_t sx = q.x * N; sx < (q.x + 1) * N && i < pts.size(); ++sx)
        for (std::int64_t sy = q.y * N; sy < (q.y + 1) * N && i < pts.size(); ++sy) {
          IVec2 from = pts[i++];
          IVec2 to{sx, sy};
          bij.from.push_back(from);
          bij.to.push_back(to);
          double dx = static_cast<double>(to.x - from.x);
          double dy = static_cast<double>(to.y - from.y);
          maxdisp2 = std::max(maxdisp2, dx * dx + dy * dy);
        }
    }
  bij.max_displacement = std::sqrt(maxdisp2);
  if (bij.max_displacement > 2.0 * std::sqrt(2.0) * N + 1e-9)
    throw defect_error("build_bijection: displacement bound violated");
  return bij;
}

std::int64_t PrefixFlow1D::max_abs() const {
  std::int64_t m = std::max(std::abs(left_value), std::abs(right_value));
  for (const auto& [k, v] : edges) m = std::max(m, std::abs(v));
  return m;
}

PrefixFlow1D prefix_flow_1d(const std::map<std::int64_t, std::int64_t>& mu) {
  PrefixFlow1D phi;
  if (mu.empty()) return phi;
  std::int64_t kmin = std::min<std::int64_t>(mu.begin()->first, 0);
  std::int64_t kmax = std::max<std::int64_t>(mu.rbegin()->first, 0);
  auto mu_at = [&](std::int64_t i) {
    auto it = mu.find(i);
    return it == mu.end() ? std::int64_t(0) : it->second;
  };
  phi.edges[0] = 0;
  std::int64_t acc = 0;
  for (std::int64_t k = 1; k <= kmax; ++k) {
    acc += mu_at(k);
    phi.edges[k] = -acc;
  }
  phi.right_value = -acc;
  acc = 0;
  for (std::int64_t k = -1; k >= kmin - 1; --k) {
    acc += mu_at(k + 1);
    phi.edges[k] = acc;
  }
  phi.left_value = acc;
  return phi;
}

}  // namespace lab
