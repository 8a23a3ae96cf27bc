#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <future>
#include <thread>
#include <vector>

namespace lab {

// Thread cap: LAB_THREADS env var, else hardware concurrency.
inline unsigned max_threads() {
  if (const char* env = std::getenv("LAB_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

// Sum fn(i) for i in [0, n). Work is split into fixed-size chunks summed
// sequentially, and the chunk sums are combined in a fixed pairwise tree, so
// the result is bit-identical for any thread count.
inline double chunked_sum(std::size_t n, const std::function<double(std::size_t)>& fn,
                          std::size_t chunk = 8192) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(nchunks, 0.0);

  auto run_chunk = [&](std::size_t c) {
    std::size_t lo = c * chunk;
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += fn(i);
    partial[c] = s;
  };

  unsigned threads = max_threads();
  if (threads <= 1 || nchunks <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c) run_chunk(c);
  } else {
    std::vector<std::future<void>> futs;
    std::size_t per = (nchunks + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      std::size_t lo = t * per;
      std::size_t hi = std::min(nchunks, lo + per);
      if (lo >= hi) break;
      futs.push_back(std::async(std::launch::async, [&, lo, hi] {
        for (std::size_t c = lo; c < hi; ++c) run_chunk(c);
      }));
    }
    for (auto& f : futs) f.get();
  }

  // Pairwise tree combine, independent of thread layout.
  std::vector<double> level = std::move(partial);
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2, 0.0);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2)
      next[i / 2] = level[i] + level[i + 1];
    if (level.size() % 2) next.back() = level.back();
    level = std::move(next);
  }
  return level[0];
}

}  // namespace lab
