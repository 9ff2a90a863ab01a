#include "invlab/util.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace invlab {

int worker_count() {
  if (const char* env = std::getenv("INVLAB_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
  const int workers = worker_count();
  if (n <= 0) return;
  if (workers == 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto run = [&]() {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = int(std::min<std::int64_t>(workers, n)) - 1;
  pool.reserve(std::size_t(spawn));
  for (int t = 0; t < spawn; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

} // namespace invlab
