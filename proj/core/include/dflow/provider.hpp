#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "dflow/process.hpp"
#include "dflow/types.hpp"

namespace dflow {

/// How worker-hosts are started inside a granted block: `single` starts one
/// host per block, `per_node` fans one host out per node (the srun-style
/// launcher), i.e. exactly nodes_per_block hosts.
struct LauncherSpec {
    enum class Kind { single, per_node };
    Kind kind = Kind::per_node;
};

/// Where provider commands run. Local-only in this artifact; the interface
/// takes (command, env) and returns (exit, output) so a remote channel could
/// be added without touching providers.
struct ChannelSpec {
    enum class Kind { local };
    Kind kind = Kind::local;
};

/// Queue-wait model for the simulated batch scheduler. delay = delay_s plus
/// uniform jitter in [-jitter_s, +jitter_s] drawn from a seeded generator,
/// so a seeded model yields a reproducible timeline.
struct QueueDelayModel {
    double delay_s = 0.0;
    double jitter_s = 0.0;
    std::uint64_t seed = 0;
};

struct ProviderSpec {
    enum class Kind { local, sim_batch };

    Kind kind = Kind::local;
    int nodes_per_block = 1;
    int init_blocks = 1;
    int min_blocks = 0;
    int max_blocks = 1;
    std::string partition;  // sim_batch: named queue profile
    LauncherSpec launcher;
    ChannelSpec channel;
    QueueDelayModel queue_delay;  // sim_batch
};

enum class BlockState { requested, pending, running, cancelled, failed, done };

const char* to_string(BlockState s);
bool legal_block_transition(BlockState from, BlockState to);

/// One provider-granted allocation unit hosting launched worker processes.
struct Block {
    BlockId id = 0;
    BlockState state = BlockState::requested;
    std::string job_id;               // sim_batch
    std::vector<ChildProcess> nodes;  // one worker-host process per node
    double submit_time_s = 0;         // relative to provider start
    double start_time_s = 0;          // scheduled start (submit + drawn delay)
    bool releasing = false;           // graceful scale-in in progress
};

class Channel {
  public:
    virtual ~Channel() = default;

    /// Runs a provider command to completion, capturing output.
    virtual CommandResult execute(const std::string& command,
                                  const std::map<std::string, std::string>& env) = 0;

    /// Starts a long-lived process (a worker-host).
    virtual ChildProcess launch(const SpawnOptions& opts) = 0;
};

std::unique_ptr<Channel> make_channel(const ChannelSpec& spec);

/// Command template for one worker-host. The provider appends
/// --block-id/--node when fanning out.
struct WorkerHostCommand {
    std::vector<std::string> argv;
    std::map<std::string, std::string> env;
    std::filesystem::path log_dir;  // host stdout/stderr files land here
};

/// Grants and releases blocks of worker-hosts. Operations are serialized
/// per instance; poll() advances time-driven state (simulated queue, child
/// reaping) and is called from the executor's monitor thread as well as by
/// status().
class Provider {
  public:
    explicit Provider(ProviderSpec spec, std::filesystem::path run_dir);
    virtual ~Provider() = default;

    const ProviderSpec& spec() const { return spec_; }

    /// Requests one block. Throws ProviderError when requested+pending+
    /// running blocks would exceed max_blocks.
    BlockId submit_block(const WorkerHostCommand& cmd);

    /// Current states, consistent with the block transition rules. Throws
    /// ProviderError for an unknown id.
    std::vector<BlockState> status(std::span<const BlockId> ids);

    /// Pending jobs leave the queue unstarted; running blocks' hosts get
    /// SIGTERM and, after a 5 s grace period, SIGKILL.
    void cancel(std::span<const BlockId> ids);

    void poll();

    struct Counts {
        int not_terminal = 0;  // requested + pending + running
        int running = 0;
    };
    Counts counts();

    /// Host pids of a block (fault-injection hooks for tests).
    std::vector<pid_t> node_pids(BlockId id);

    /// Blocks that entered `failed` since the previous call.
    std::vector<BlockId> take_newly_failed();

    /// Marks a block as gracefully releasing: once its hosts exit, poll()
    /// moves it to cancelled instead of done/failed.
    void begin_release(BlockId id);

  protected:
    virtual void do_submit(Block& b, const WorkerHostCommand& cmd) = 0;
    virtual void do_poll() {}

    void launch_hosts(Block& b, const WorkerHostCommand& cmd);
    double now_s() const;
    void transition(Block& b, BlockState to);
    virtual void on_transition(const Block&) {}

    ProviderSpec spec_;
    std::filesystem::path run_dir_;
    std::unique_ptr<Channel> channel_;
    std::mutex m_;
    std::map<BlockId, Block> blocks_;
    std::vector<BlockId> newly_failed_;
    BlockId next_id_ = 0;
    std::chrono::steady_clock::time_point epoch_ = std::chrono::steady_clock::now();
    std::vector<std::pair<BlockId, WorkerHostCommand>> queued_cmds_;
};

/// Spawns worker-hosts immediately: submit -> running in one step.
class LocalProvider : public Provider {
  public:
    using Provider::Provider;

  protected:
    void do_submit(Block& b, const WorkerHostCommand& cmd) override;
};

/// Slurm-like simulated batch scheduler: jobs wait in a FIFO queue for a
/// modeled delay (and a per-partition running-job cap), then launch their
/// hosts. Dumps scheduler state to <run_dir>/simqueue.json on every
/// transition.
class SimBatchProvider : public Provider {
  public:
    SimBatchProvider(ProviderSpec spec, std::filesystem::path run_dir);

    struct PartitionProfile {
        double extra_delay_s = 0.0;
        int max_running = 0;  // 0 = unlimited
    };

    static PartitionProfile profile_for(const std::string& partition);

  protected:
    void do_submit(Block& b, const WorkerHostCommand& cmd) override;
    void do_poll() override;
    void on_transition(const Block&) override;

  private:
    void dump_queue_locked();
    double draw_delay();

    PartitionProfile profile_;
    std::uint64_t rng_state_;
    int sim_job_seq_ = 0;
};

std::unique_ptr<Provider> make_provider(const ProviderSpec& spec,
                                        const std::filesystem::path& run_dir);

}  // namespace dflow
