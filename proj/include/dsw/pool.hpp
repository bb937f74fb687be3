#pragma once

// Fixed-size worker pool used for row-parallel FFT stages and elementwise maps.
// Work items are index ranges with disjoint writes, so results are bitwise
// independent of the worker count.

#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dsw {

class WorkerPool {
public:
    explicit WorkerPool(unsigned workers = 0) { start(workers ? workers : default_workers()); }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    ~WorkerPool() { stop(); }

    unsigned workers() const { return static_cast<unsigned>(threads_.size()) + 1; }

    void resize(unsigned workers) {
        stop();
        start(workers ? workers : 1);
    }

    // Runs fn(i) for i in [0, n). The caller participates, so a pool of size 1
    // has no helper threads at all.
    template <typename Fn>
    void parallel_for(std::size_t n, Fn&& fn) {
        const unsigned w = workers();
        if (n == 0) return;
        if (w == 1 || n == 1) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        std::size_t chunk = (n + w - 1) / w;
        std::vector<std::function<void()>> jobs;
        for (unsigned t = 1; t < w; ++t) {
            std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            jobs.emplace_back([&fn, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            });
        }
        dispatch(jobs);
        for (std::size_t i = 0; i < std::min(n, chunk); ++i) fn(i);
        wait();
    }

    static unsigned default_workers() {
        if (const char* env = std::getenv("DSW_WORKERS")) {
            int v = std::atoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw ? hw : 1;
    }

private:
    void start(unsigned workers) {
        done_ = false;
        for (unsigned i = 1; i < workers; ++i)
            threads_.emplace_back([this] { worker_loop(); });
    }

    void stop() {
        {
            std::lock_guard lk(mu_);
            done_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
        threads_.clear();
    }

    void dispatch(std::vector<std::function<void()>>& jobs) {
        std::lock_guard lk(mu_);
        pending_ = &jobs;
        next_ = 0;
        running_ = 0;
        cv_.notify_all();
    }

    void wait() {
        // Caller helps drain the queue, then blocks until in-flight jobs finish.
        for (;;) {
            std::function<void()>* job = nullptr;
            {
                std::lock_guard lk(mu_);
                if (pending_ && next_ < pending_->size()) {
                    job = &(*pending_)[next_++];
                    ++running_;
                }
            }
            if (!job) break;
            (*job)();
            std::lock_guard lk(mu_);
            --running_;
        }
        std::unique_lock lk(mu_);
        idle_cv_.wait(lk, [this] { return running_ == 0; });
        pending_ = nullptr;
    }

    void worker_loop() {
        for (;;) {
            std::function<void()>* job = nullptr;
            {
                std::unique_lock lk(mu_);
                cv_.wait(lk, [this] {
                    return done_ || (pending_ && next_ < pending_->size());
                });
                if (done_) return;
                job = &(*pending_)[next_++];
                ++running_;
            }
            (*job)();
            {
                std::lock_guard lk(mu_);
                --running_;
            }
            idle_cv_.notify_all();
        }
    }

    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable cv_, idle_cv_;
    std::vector<std::function<void()>>* pending_ = nullptr;
    std::size_t next_ = 0;
    unsigned running_ = 0;
    bool done_ = false;
};

// Pool shared by all transforms in the process.
inline WorkerPool& fft_pool() {
    static WorkerPool pool;
    return pool;
}

inline void set_fft_workers(unsigned n) { fft_pool().resize(n); }

}  // namespace dsw
