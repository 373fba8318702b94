#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace stereolab {

// Worker budget: hardware concurrency, optionally capped by STEREO_LAB_THREADS.
inline int thread_budget() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("STEREO_LAB_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

// Static partition over [0, count); fn(begin, end) must only write rows in its
// own chunk. Outputs are bitwise independent of the worker count.
template <typename Fn>
void parallel_rows(int count, Fn&& fn) {
  if (count <= 0) return;
  const int workers = std::min(thread_budget(), count);
  if (workers <= 1) {
    fn(0, count);
    return;
  }
  const int chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] { fn(begin, end); });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace stereolab
