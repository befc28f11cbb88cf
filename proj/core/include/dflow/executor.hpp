#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dflow/app.hpp"
#include "dflow/arg_value.hpp"
#include "dflow/outcome.hpp"
#include "dflow/provider.hpp"
#include "dflow/types.hpp"

namespace dflow {

struct ExecutorSpec {
    enum class Kind { in_process, worker_pool };

    std::string label;
    Kind kind = Kind::in_process;
    int max_workers = 1;                  // per node
    std::string address = "127.0.0.1";    // worker_pool: bind address
    std::optional<ProviderSpec> provider;  // worker_pool
};

/// Fully resolved, staged, self-contained description of one execution
/// attempt. Everything except `local_callable` survives serialization to a
/// worker process.
struct TaskPayload {
    TaskId id;
    std::uint64_t attempt = 0;

    AppSpec::Kind kind = AppSpec::Kind::native;
    std::string app_name;  // native: AppRegistry key on the executing side
    std::string command;   // shell: rendered command line

    ArgList args;
    ArgMap kwargs;
    std::vector<FileRef> inputs;
    std::vector<FileRef> outputs;

    std::filesystem::path stdout_path;  // shell capture files
    std::filesystem::path stderr_path;

    /// In-process fast path for callables that are not in the registry
    /// (e.g. ad-hoc lambdas). Never serialized.
    NativeFn local_callable;
};

/// Wire form of a payload (everything but local_callable).
ArgValue payload_to_value(const TaskPayload& p);
TaskPayload payload_from_value(const ArgValue& v);

/// Runs a payload on the calling thread: native apps through the registry
/// (or local_callable), shell apps under /bin/sh with stdout/stderr captured
/// to the payload's files. Never throws: all failures become error
/// outcomes. Both executors and the worker-host funnel through this.
Outcome execute_payload(const TaskPayload& p);

/// (task, attempt, outcome), delivered exactly once per execute() call.
using CompletionFn = std::function<void(TaskId, std::uint64_t, Outcome)>;

struct ExecutorStats {
    std::size_t queued = 0;   // accepted, not yet dispatched
    std::size_t active = 0;   // dispatched, not yet completed
    std::size_t capacity = 0; // live worker slots
    int blocks_running = 0;
    int blocks_not_terminal = 0;
};

/// Scaling policy knobs, applied at the next poll tick.
struct StrategyParams {
    double poll_interval_s = 1.0;
    double idle_timeout_s = 60.0;
    std::optional<int> max_blocks_override;
};

/// Backend that runs resolved tasks on workers.
class Executor {
  public:
    virtual ~Executor() = default;

    virtual const std::string& label() const = 0;
    virtual void start(CompletionFn on_complete) = 0;

    /// Non-blocking enqueue; the attempt's completion event arrives on the
    /// executor's delivery thread exactly once.
    virtual void execute(TaskPayload task) = 0;

    /// drain: stop accepting, finish outstanding work, release resources.
    /// cancel: fail queued attempts with `cancelled`, abandon running ones
    /// best-effort, release resources.
    virtual void shutdown(ShutdownMode mode) = 0;

    virtual ExecutorStats stats() = 0;
};

std::shared_ptr<Executor> make_executor(const ExecutorSpec& spec,
                                        const std::filesystem::path& run_dir,
                                        const StrategyParams& strategy);

}  // namespace dflow
