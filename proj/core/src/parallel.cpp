#include "hexcone/parallel.hpp"

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <memory>
#include <mutex>

namespace hexcone {

namespace {
std::mutex cap_mutex;
std::unique_ptr<tbb::global_control> cap;
int cap_value = 0;
}  // namespace

void set_max_threads(int n) {
  std::lock_guard<std::mutex> lock(cap_mutex);
  cap.reset();
  cap_value = n > 0 ? n : 0;
  if (cap_value > 0)
    cap = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                 static_cast<std::size_t>(cap_value));
}

int max_threads() {
  std::lock_guard<std::mutex> lock(cap_mutex);
  return cap_value > 0 ? cap_value : tbb::this_task_arena::max_concurrency();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  tbb::parallel_for(std::size_t{0}, n, [&](std::size_t i) { body(i); });
}

}  // namespace hexcone
