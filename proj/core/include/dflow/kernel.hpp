#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <unordered_map>
#include <vector>

#include "dflow/executor.hpp"
#include "dflow/future.hpp"
#include "dflow/task.hpp"

namespace dflow {

struct ConfigDocument;

struct KernelConfig {
    int retries = 0;          // default per-task retry budget
    double retry_delay_s = 0; // backoff between attempts
    std::filesystem::path run_dir = "runinfo";
    StrategyParams strategy;
    int staging_threads = 4;  // launch-preparation (staging) concurrency
};

/// The dataflow engine: registers tasks, tracks dependency resolution,
/// launches launchable tasks on executors, applies retries and propagates
/// failures. Shareable across submitting threads; graph state is mutated
/// under a single lock, with completion events serialized through one
/// internal event thread. Waiting on futures never mutates the graph.
class Kernel {
  public:
    Kernel(KernelConfig config, std::vector<std::shared_ptr<Executor>> executors);
    ~Kernel();  // drains

    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    /// Registers a task and returns its future immediately, without waiting
    /// for execution. Throws ShutdownError after shutdown began.
    AppFuture submit(TaskSubmission submission);

    /// Convenience wrapper over submit().
    AppFuture invoke(const AppSpec& app, ArgList args = {}, ArgMap kwargs = {},
                     std::vector<FileRef> outputs = {});

    /// Blocks until every future is terminal (or the deadline passes) and
    /// returns their outcomes in input order. Throws WaitTimeoutError
    /// listing the unfinished tasks.
    std::vector<Outcome> wait_all(std::span<const AppFuture> futures,
                                  std::optional<std::chrono::milliseconds> timeout = {});

    /// drain: stop accepting submissions, wait for every registered task to
    /// reach a terminal state, release executors and provider blocks.
    /// cancel: not-yet-running tasks fail with a cancellation error; running
    /// tasks are abandoned best-effort. Idempotent.
    void shutdown(ShutdownMode mode = ShutdownMode::drain);

    /// Applied by worker-pool executors at their next poll tick.
    void update_strategy(const StrategyParams& s);

    const std::filesystem::path& run_dir() const { return config_.run_dir; }
    std::shared_ptr<Executor> executor(const std::string& label) const;

    // Introspection (tests, CLI reports).
    std::size_t task_count() const;
    std::size_t non_terminal_count() const;
    TaskState task_state(TaskId id) const;
    int attempts_made(TaskId id) const;
    struct TaskTimes {
        std::chrono::steady_clock::time_point submitted;
        std::chrono::steady_clock::time_point terminal;
    };
    TaskTimes task_times(TaskId id) const;

    /// Observes every state transition (called with the graph lock held);
    /// install before submitting.
    using TransitionHook = std::function<void(TaskId, TaskState, TaskState)>;
    void set_transition_hook(TransitionHook hook);

  private:
    struct TaskEntry {
        TaskRecord record;
        std::shared_ptr<detail::OutcomeSlot> app_slot;
        std::vector<std::shared_ptr<detail::OutcomeSlot>> output_slots;
        std::vector<Outcome> output_outcomes;  // filled at completion
        std::set<TaskId> unresolved;
        std::vector<TaskId> dependents;
        std::vector<DataFutureRef> data_refs;
        std::uint64_t attempt = 0;
        int attempts_made = 0;
        std::chrono::steady_clock::time_point submitted;
        std::chrono::steady_clock::time_point terminal;
    };

    void transition_locked(TaskEntry& e, TaskState to);
    void promote_locked(TaskEntry& e);
    void launch_locked(TaskEntry& e);
    void mark_dep_failed_locked(TaskEntry& e, std::vector<TaskId> roots);
    std::vector<TaskId> collect_failure_roots_locked(const TaskEntry& e);
    void finish_locked(TaskEntry& e, TaskState terminal_state, Outcome outcome);
    void process_completion(TaskId id, std::uint64_t attempt, Outcome outcome);
    void process_retry_now(TaskId id, std::uint64_t expected_attempt);
    void retry_now_locked(TaskEntry& e, std::uint64_t expected_attempt);
    ResolvedDeps snapshot_deps_locked(const TaskEntry& e);
    void prepare_and_execute(TaskId id, std::uint64_t attempt, ResolvedDeps resolved);
    void post_event(std::function<void()> fn);
    void post_staging(std::function<void()> fn);
    void event_loop();
    void staging_loop();
    void log_transition(TaskId id, TaskState from, TaskState to, const std::string& label);
    TaskEntry& entry_locked(TaskId id);
    const TaskEntry& entry_locked(TaskId id) const;

    KernelConfig config_;
    std::vector<std::shared_ptr<Executor>> executors_;
    std::unordered_map<std::string, std::shared_ptr<Executor>> executors_by_label_;

    mutable std::mutex graph_mu_;
    std::vector<std::unique_ptr<TaskEntry>> tasks_;  // index = TaskId
    std::size_t non_terminal_ = 0;
    std::condition_variable all_terminal_cv_;
    enum class Phase { running, draining, cancelling, stopped };
    Phase phase_ = Phase::running;

    std::mutex events_mu_;
    std::condition_variable events_cv_;
    std::deque<std::function<void()>> events_;
    bool events_stop_ = false;
    std::thread event_thread_;

    std::mutex staging_mu_;
    std::condition_variable staging_cv_;
    std::deque<std::function<void()>> staging_jobs_;
    bool staging_stop_ = false;
    std::vector<std::thread> staging_threads_;

    std::mutex log_mu_;
    std::ofstream log_;

    TransitionHook hook_;
};

/// Builds executors and providers from a loaded configuration and starts a
/// kernel on them.
std::unique_ptr<Kernel> make_kernel(const ConfigDocument& doc);

}  // namespace dflow
