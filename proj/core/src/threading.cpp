#include "sesr/threading.hpp"

#include <atomic>
#include <thread>
#include <vector>

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace sesr {
namespace {
std::atomic<int> g_threads{0};
}

void set_compute_threads(int n) {
  g_threads.store(n);
  const int effective = n > 0 ? n : int(std::thread::hardware_concurrency());
  if (openblas_set_num_threads) openblas_set_num_threads(effective);
}

int compute_threads() {
  const int n = g_threads.load();
  if (n > 0) return n;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

void parallel_for(int begin, int end, const std::function<void(int)>& body) {
  const int count = end - begin;
  if (count <= 0) return;
  const int workers = std::min(compute_threads(), count);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) body(i);
    return;
  }
  std::atomic<int> next{begin};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&next, end, &body] {
      for (int i = next.fetch_add(1); i < end; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace sesr
