#pragma once

#include <atomic>
#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "dflow/executor.hpp"
#include "dflow/tcp.hpp"
#include "dflow/wire.hpp"

namespace dflow {

/// Pilot-job executor: capacity comes from provider-granted blocks, each
/// hosting `nodes_per_block` worker-host processes that connect back over a
/// loopback socket and pull tasks. Dispatch is FIFO. A scaling policy adds
/// a block when the backlog exceeds live workers and releases blocks idle
/// past idle_timeout.
class WorkerPoolExecutor : public Executor {
  public:
    struct Tuning {
        std::chrono::milliseconds heartbeat_interval{5000};
        int missed_heartbeat_limit = 3;
        std::chrono::milliseconds monitor_tick{50};
        std::string worker_exe;  // empty: $DFLOW_WORKER, then alongside this binary
    };

    WorkerPoolExecutor(ExecutorSpec spec, std::filesystem::path run_dir,
                       StrategyParams strategy, Tuning tuning);
    WorkerPoolExecutor(ExecutorSpec spec, std::filesystem::path run_dir,
                       StrategyParams strategy);
    ~WorkerPoolExecutor() override;

    const std::string& label() const override { return spec_.label; }
    void start(CompletionFn on_complete) override;
    void execute(TaskPayload task) override;
    void shutdown(ShutdownMode mode) override;
    ExecutorStats stats() override;

    /// Requests n more blocks from the provider. Throws ProviderError if
    /// that would exceed max_blocks; no partial request is made.
    std::vector<BlockId> scale_out(int n_blocks);

    /// Graceful release: the blocks' workers finish in-flight tasks, then
    /// their hosts exit and the blocks are cancelled via the provider.
    void scale_in(std::span<const BlockId> ids);

    /// Applied at the next poll tick.
    void update_strategy(const StrategyParams& s);

    Provider& provider() { return *provider_; }
    std::size_t connected_hosts();

  private:
    struct Host {
        std::uint64_t conn_id = 0;
        TcpSocket socket;
        std::mutex write_mu;
        std::thread reader;
        BlockId block = 0;
        int node = 0;
        int slots = 0;
        bool registered = false;
        bool draining = false;
        bool dead = false;
        std::map<std::pair<std::uint64_t, std::uint64_t>, TaskId> in_flight;
        std::chrono::steady_clock::time_point last_rx;
    };

    void accept_loop();
    void reader_loop(std::shared_ptr<Host> host);
    void monitor_loop();
    void handle_frame(const std::shared_ptr<Host>& host, const wire::Frame& f);
    void host_lost(const std::shared_ptr<Host>& host);
    void pump_dispatch_locked();
    bool send_frame(const std::shared_ptr<Host>& host, const wire::Frame& f);
    void deliver(std::pair<std::uint64_t, std::uint64_t> key, TaskId id, Outcome o);
    void strategy_tick();
    void release_blocks(std::span<const BlockId> ids, bool graceful);
    WorkerHostCommand host_command() const;
    int effective_max_blocks(const std::shared_ptr<const StrategyParams>& s) const;

    std::shared_ptr<const StrategyParams> strategy_snapshot();

    ExecutorSpec spec_;
    std::filesystem::path run_dir_;
    Tuning tuning_;
    std::mutex strategy_mu_;
    std::shared_ptr<const StrategyParams> strategy_;  // swapped as one snapshot
    std::unique_ptr<Provider> provider_;
    CompletionFn on_complete_;

    TcpListener listener_;
    std::thread accept_thread_;
    std::thread monitor_thread_;
    std::atomic<bool> stopping_{false};

    std::mutex m_;
    std::deque<TaskPayload> queue_;
    std::map<std::uint64_t, std::shared_ptr<Host>> hosts_;  // by conn_id
    std::vector<std::shared_ptr<Host>> retired_;            // dead hosts awaiting join
    // Attempts dispatched and not yet completed: (task, attempt) -> conn_id.
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> outstanding_;
    std::map<BlockId, std::chrono::steady_clock::time_point> block_idle_since_;
    std::uint64_t next_conn_id_ = 1;
    std::chrono::steady_clock::time_point last_strategy_tick_;
};

}  // namespace dflow
