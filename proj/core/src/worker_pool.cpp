#include "spcg/worker_pool.hpp"

#include <map>
#include <memory>

#include "spcg/errors.hpp"

namespace spcg {

WorkerPool::WorkerPool(std::size_t workers) {
  if (workers == 0) throw Error("worker pool needs at least one lane");
  threads_.reserve(workers - 1);
  for (std::size_t lane = 1; lane < workers; ++lane) {
    threads_.emplace_back([this, lane] { lane_loop(lane); });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run(const std::function<void(std::size_t)>& task) {
  std::lock_guard run_lock(run_mutex_);
  if (threads_.empty()) {
    task(0);
    return;
  }
  {
    std::lock_guard lock(mutex_);
    task_ = &task;
    pending_ = threads_.size();
    error_ = nullptr;
    ++generation_;
  }
  start_cv_.notify_all();

  std::exception_ptr local;
  try {
    task(0);
  } catch (...) {
    local = std::current_exception();
  }

  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  task_ = nullptr;
  if (local) std::rethrow_exception(local);
  if (error_) std::rethrow_exception(error_);
}

void WorkerPool::lane_loop(std::size_t lane) {
  std::size_t seen = 0;
  for (;;) {
    const std::function<void(std::size_t)>* task = nullptr;
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
      task = task_;
    }
    std::exception_ptr err;
    try {
      (*task)(lane);
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      if (err && !error_) error_ = err;
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }
}

WorkerPool& WorkerPool::shared(std::size_t workers) {
  static std::mutex registry_mutex;
  static std::map<std::size_t, std::unique_ptr<WorkerPool>> registry;
  std::lock_guard lock(registry_mutex);
  auto& slot = registry[workers];
  if (!slot) slot = std::make_unique<WorkerPool>(workers);
  return *slot;
}

}  // namespace spcg
