#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "core/stats.hpp"

namespace coalflow {

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Replica-sharded work.  Chunks have a fixed size, so any side effect keyed
// by the replica index (slot writes, per-chunk accumulators) is independent
// of the thread schedule and count.
inline void for_each_replica(std::uint64_t reps, int threads,
                             const std::function<void(std::uint64_t)>& fn) {
  constexpr std::uint64_t kChunk = 1024;
  const int workers = resolve_thread_count(threads);
  if (workers <= 1 || reps <= kChunk) {
    for (std::uint64_t r = 0; r < reps; ++r) fn(r);
    return;
  }
  const std::uint64_t chunks = (reps + kChunk - 1) / kChunk;
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks || failed.load()) return;
      const std::uint64_t lo = c * kChunk;
      const std::uint64_t hi = std::min(reps, lo + kChunk);
      try {
        for (std::uint64_t r = lo; r < hi; ++r) fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int i = 0; i < workers; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(error);
}

// Mean/variance of a per-replica sample with a deterministic merge: chunk
// accumulators are combined in chunk order whatever the schedule was.
inline StreamStats parallel_stats(
    std::uint64_t reps, int threads,
    const std::function<double(std::uint64_t)>& sample) {
  constexpr std::uint64_t kChunk = 1024;
  const std::uint64_t chunks = (reps + kChunk - 1) / kChunk;
  std::vector<StreamStats> partial(chunks);
  for_each_replica(reps, threads, [&](std::uint64_t r) {
    partial[r / kChunk].update(sample(r));
  });
  StreamStats total;
  for (const auto& p : partial) total = StreamStats::merged(total, p);
  return total;
}

}  // namespace coalflow
