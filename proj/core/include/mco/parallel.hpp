#pragma once

#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mco {

// Persistent pool running index-range jobs. Chunking is fixed by (n, workers)
// alone, and each index is processed independently, so results do not depend
// on the worker count. A pool of size 1 executes inline on the caller.
class WorkerPool {
 public:
  explicit WorkerPool(int workers) : workers_(workers < 1 ? 1 : workers) {
    for (int w = 1; w < workers_; ++w) {
      threads_.emplace_back([this, w] { worker_loop(w); });
    }
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    {
      std::lock_guard<std::mutex> lk(m_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  int workers() const { return workers_; }

  // fn(lo, hi) is called on contiguous chunks covering [0, n).
  void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (workers_ == 1 || n == 1) {
      fn(0, n);
      return;
    }
    std::size_t chunk = (n + workers_ - 1) / workers_;
    {
      std::lock_guard<std::mutex> lk(m_);
      job_ = &fn;
      job_n_ = n;
      job_chunk_ = chunk;
      pending_ = workers_ - 1;
      ++generation_;
    }
    cv_.notify_all();
    run_chunk(0, n, chunk, fn);  // caller acts as worker 0
    std::unique_lock<std::mutex> lk(m_);
    done_cv_.wait(lk, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

  // Default worker count: SWARM_OPT_WORKERS if set, hardware_concurrency otherwise.
  static int default_workers() {
    if (const char* env = std::getenv("SWARM_OPT_WORKERS")) {
      try {
        int v = std::stoi(env);
        if (v >= 1) return v;
      } catch (const std::exception&) {
      }
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }

 private:
  static void run_chunk(std::size_t w, std::size_t n, std::size_t chunk,
                        const std::function<void(std::size_t, std::size_t)>& fn) {
    std::size_t lo = w * chunk;
    if (lo >= n) return;
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    fn(lo, hi);
  }

  void worker_loop(int w) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(std::size_t, std::size_t)>* job = nullptr;
      std::size_t n = 0, chunk = 0;
      {
        std::unique_lock<std::mutex> lk(m_);
        cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        job = job_;
        n = job_n_;
        chunk = job_chunk_;
      }
      run_chunk(static_cast<std::size_t>(w), n, chunk, *job);
      {
        std::lock_guard<std::mutex> lk(m_);
        if (--pending_ == 0) done_cv_.notify_all();
      }
    }
  }

  int workers_;
  std::vector<std::thread> threads_;
  std::mutex m_;
  std::condition_variable cv_, done_cv_;
  const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
  std::size_t job_n_ = 0, job_chunk_ = 0;
  int pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace mco
