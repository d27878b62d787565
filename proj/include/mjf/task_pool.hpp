#pragma once

#include <cstddef>
#include <functional>

namespace mjf {

/// Fixed-width fork/join helper. parallel_for splits [0, n) into contiguous
/// chunks, one per worker; callers write results by index so the outcome
/// never depends on scheduling.
class TaskPool {
 public:
  explicit TaskPool(std::size_t workers = 1) : workers_(workers == 0 ? 1 : workers) {}

  std::size_t workers() const noexcept { return workers_; }
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) const;

 private:
  std::size_t workers_;
};

}  // namespace mjf
