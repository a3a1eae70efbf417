#pragma once
// Deterministic parallel execution over realizations.
//
// Work on [0, n) is split into chunks of a fixed size that does not depend on
// the worker count; chunk results are combined strictly in ascending chunk
// order on the calling thread. Together with per-realization noise streams
// this makes every estimate bit-identical for any number of workers.

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace sqv {

struct ExecPolicy {
  int workers = 1;
  std::size_t chunk = 256;  // realizations per chunk; fixed, not tuned per run
};

namespace detail {
inline std::size_t chunk_count(std::size_t n, std::size_t chunk) {
  return chunk == 0 ? 0 : (n + chunk - 1) / chunk;
}
}  // namespace detail

// make(chunk_index, begin, end) -> T, computed possibly in parallel;
// combine(chunk_index, T&) called sequentially for chunk_index = 0,1,2,...
template <class T, class Make, class Combine>
void chunked_reduce(std::size_t n, const ExecPolicy& exec, Make make, Combine combine) {
  const std::size_t nc = detail::chunk_count(n, exec.chunk);
  if (nc == 0) return;
  if (exec.workers <= 1 || nc == 1) {
    for (std::size_t c = 0; c < nc; ++c) {
      const std::size_t b = c * exec.chunk;
      const std::size_t e = std::min(n, b + exec.chunk);
      T part = make(c, b, e);
      combine(c, part);
    }
    return;
  }
  std::vector<T> parts(nc);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= nc) break;
      const std::size_t b = c * exec.chunk;
      const std::size_t e = std::min(n, b + exec.chunk);
      parts[c] = make(c, b, e);
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::min<std::size_t>(static_cast<std::size_t>(exec.workers), nc);
  pool.reserve(static_cast<std::size_t>(nw));
  for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t c = 0; c < nc; ++c) combine(c, parts[c]);
}

// Disjoint-write parallel loop (e.g. filling ensemble rows); no reduction, so
// scheduling cannot affect the result.
template <class Body>
void parallel_for(std::size_t n, const ExecPolicy& exec, Body body) {
  struct Unit {};
  chunked_reduce<Unit>(
      n, exec,
      [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) body(i);
        return Unit{};
      },
      [](std::size_t, Unit&) {});
}

}  // namespace sqv
