#pragma once

// Deterministic chunked parallelism. Work is split into fixed-size chunks
// whose partial results are combined in chunk order, so results are
// bit-identical for any thread count. FORGE_THREADS caps the pool.

#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace forge {

inline unsigned num_threads() {
  if (const char* env = std::getenv("FORGE_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Applies fn(begin, end) over [0, n) in fixed chunks, possibly in parallel.
// fn must only touch disjoint state per chunk.
inline void parallel_chunks(std::size_t n,
                            const std::function<void(std::size_t, std::size_t)>& fn,
                            std::size_t chunk = 1 << 16) {
  if (n == 0) return;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  const unsigned workers = num_threads();
  if (workers <= 1 || nchunks <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      fn(c * chunk, std::min(n, (c + 1) * chunk));
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t c = w; c < nchunks; c += workers)
        fn(c * chunk, std::min(n, (c + 1) * chunk));
    });
  }
  for (auto& t : pool) t.join();
}

// Deterministic sum of term(i) for i in [0, n): per-chunk partials are
// accumulated in index order, then combined in chunk order.
inline double deterministic_sum(std::size_t n,
                                const std::function<double(std::size_t)>& term,
                                std::size_t chunk = 1 << 16) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(nchunks, 0.0);
  parallel_chunks(
      n,
      [&](std::size_t b, std::size_t e) {
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i) s += term(i);
        partial[b / chunk] = s;
      },
      chunk);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace forge
