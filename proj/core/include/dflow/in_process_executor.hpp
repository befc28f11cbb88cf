#pragma once

#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

#include "dflow/executor.hpp"

namespace dflow {

/// Thread-pool executor running tasks inside the kernel process.
class InProcessExecutor : public Executor {
  public:
    InProcessExecutor(std::string label, int max_workers);
    ~InProcessExecutor() override;

    const std::string& label() const override { return label_; }
    void start(CompletionFn on_complete) override;
    void execute(TaskPayload task) override;
    void shutdown(ShutdownMode mode) override;
    ExecutorStats stats() override;

  private:
    void worker_loop();

    std::string label_;
    int max_workers_;
    CompletionFn on_complete_;

    std::mutex m_;
    std::condition_variable cv_;
    std::deque<TaskPayload> queue_;
    std::size_t active_ = 0;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

}  // namespace dflow
