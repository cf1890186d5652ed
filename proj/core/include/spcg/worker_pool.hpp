#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace spcg {

/// Fixed set of worker lanes. run() executes a task once per lane, with lane
/// 0 on the calling thread, and returns when every lane has finished.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return threads_.size() + 1; }

  /// The first exception thrown by any lane is rethrown here.
  void run(const std::function<void(std::size_t)>& task);

  /// Process-wide pool with the given lane count, created on first use.
  static WorkerPool& shared(std::size_t workers);

 private:
  void lane_loop(std::size_t lane);

  std::vector<std::thread> threads_;
  std::mutex run_mutex_;  // one run() at a time

  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

}  // namespace spcg
