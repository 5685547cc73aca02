#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace kcport {

/// Worker cap read from KCPORT_THREADS (unset or 0 means hardware concurrency).
std::size_t worker_count();

/// Fixed chunk size for grid scans. Chunk boundaries never depend on the
/// worker count, so per-chunk partial results combined in chunk order are
/// bit-identical for any number of threads.
inline constexpr Eigen::Index kGridChunk = 2048;

// Calls fn(chunk, begin, end) once per chunk of [0, n).
template <typename Fn>
void for_each_chunk(Eigen::Index n, Fn&& fn)
{
  const Eigen::Index chunks = (n + kGridChunk - 1) / kGridChunk;
  const auto workers = static_cast<Eigen::Index>(
      std::min<std::size_t>(worker_count(), static_cast<std::size_t>(chunks)));
  auto run = [&](Eigen::Index first) {
    for (Eigen::Index c = first; c < chunks; c += std::max<Eigen::Index>(workers, 1))
      fn(c, c * kGridChunk, std::min(n, (c + 1) * kGridChunk));
  };
  if (workers <= 1) {
    run(0);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (Eigen::Index w = 1; w < workers; ++w)
    pool.emplace_back(run, w);
  run(0);
}

inline Eigen::Index chunk_count(Eigen::Index n)
{
  return (n + kGridChunk - 1) / kGridChunk;
}

} // namespace kcport
