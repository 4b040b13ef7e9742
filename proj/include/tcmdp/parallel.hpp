#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tcmdp {

/// Worker cap: TCMDP_THREADS when set and positive, else the hardware count.
inline int worker_count()
{
  if (const char* env = std::getenv("TCMDP_THREADS"))
  {
    const int v = std::atoi(env);
    if (v > 0)
      return v;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Calls f(i) for i in [0, count) on up to `workers` threads. Callers
/// write results into pre-sized slots, so output order is independent of
/// scheduling. The first exception is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t count, F&& f, int max_workers = worker_count())
{
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(max_workers, 1)), count);
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < count; ++i)
      f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++)
      {
        try
        {
          f(i);
        }
        catch (...)
        {
          std::lock_guard lock(error_mutex);
          if (!error)
            error = std::current_exception();
        }
      }
    });
  for (auto& t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

}  // namespace tcmdp
