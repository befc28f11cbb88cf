#include "dflow/provider.hpp"

#include <signal.h>

#include <algorithm>
#include <fstream>

#include "dflow/errors.hpp"
#include "json.hpp"

namespace dflow {

namespace {

constexpr std::chrono::seconds kCancelGrace{5};

class LocalChannel : public Channel {
  public:
    CommandResult execute(const std::string& command,
                          const std::map<std::string, std::string>& env) override {
        return run_capture({"/bin/sh", "-c", command}, env);
    }

    ChildProcess launch(const SpawnOptions& opts) override { return spawn_process(opts); }
};

}  // namespace

const char* to_string(BlockState s) {
    switch (s) {
        case BlockState::requested: return "requested";
        case BlockState::pending: return "pending";
        case BlockState::running: return "running";
        case BlockState::cancelled: return "cancelled";
        case BlockState::failed: return "failed";
        case BlockState::done: return "done";
    }
    return "?";
}

bool legal_block_transition(BlockState from, BlockState to) {
    switch (from) {
        case BlockState::requested:
            return to == BlockState::pending || to == BlockState::running ||
                   to == BlockState::cancelled || to == BlockState::failed;
        case BlockState::pending:
            return to == BlockState::running || to == BlockState::cancelled ||
                   to == BlockState::failed;
        case BlockState::running:
            return to == BlockState::done || to == BlockState::cancelled ||
                   to == BlockState::failed;
        case BlockState::cancelled:
        case BlockState::failed:
        case BlockState::done:
            return false;
    }
    return false;
}

std::unique_ptr<Channel> make_channel(const ChannelSpec& spec) {
    switch (spec.kind) {
        case ChannelSpec::Kind::local: return std::make_unique<LocalChannel>();
    }
    throw Error("unknown channel kind");
}

Provider::Provider(ProviderSpec spec, std::filesystem::path run_dir)
    : spec_(std::move(spec)), run_dir_(std::move(run_dir)), channel_(make_channel(spec_.channel)) {}

double Provider::now_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_).count();
}

void Provider::transition(Block& b, BlockState to) {
    if (b.state == to) return;
    if (!legal_block_transition(b.state, to))
        throw Error(std::string("illegal block transition ") + to_string(b.state) + " -> " +
                    to_string(to));
    b.state = to;
    if (to == BlockState::failed) newly_failed_.push_back(b.id);
    on_transition(b);
}

void Provider::launch_hosts(Block& b, const WorkerHostCommand& cmd) {
    int hosts = spec_.launcher.kind == LauncherSpec::Kind::per_node ? spec_.nodes_per_block : 1;
    for (int node = 0; node < hosts; ++node) {
        SpawnOptions opts;
        opts.argv = cmd.argv;
        opts.argv.push_back("--block-id");
        opts.argv.push_back(std::to_string(b.id));
        opts.argv.push_back("--node");
        opts.argv.push_back(std::to_string(node));
        opts.env_extra = cmd.env;
        if (!cmd.log_dir.empty()) {
            std::filesystem::create_directories(cmd.log_dir);
            auto stem = "block_" + std::to_string(b.id) + "_node_" + std::to_string(node);
            opts.stdout_file = cmd.log_dir / (stem + ".out");
            opts.stderr_file = cmd.log_dir / (stem + ".err");
        }
        b.nodes.push_back(channel_->launch(opts));
    }
}

BlockId Provider::submit_block(const WorkerHostCommand& cmd) {
    std::lock_guard lk(m_);
    int active = 0;
    for (auto& [_, b] : blocks_)
        if (b.state == BlockState::requested || b.state == BlockState::pending ||
            b.state == BlockState::running)
            ++active;
    if (active >= spec_.max_blocks)
        throw ProviderError("provider at capacity: " + std::to_string(active) + "/" +
                            std::to_string(spec_.max_blocks) + " blocks");
    Block b;
    b.id = next_id_++;
    b.submit_time_s = now_s();
    BlockId id = b.id;
    auto [it, _] = blocks_.emplace(id, std::move(b));
    do_submit(it->second, cmd);
    return id;
}

std::vector<BlockState> Provider::status(std::span<const BlockId> ids) {
    poll();
    std::lock_guard lk(m_);
    std::vector<BlockState> out;
    out.reserve(ids.size());
    for (BlockId id : ids) {
        auto it = blocks_.find(id);
        if (it == blocks_.end())
            throw ProviderError("unknown block id " + std::to_string(id));
        out.push_back(it->second.state);
    }
    return out;
}

void Provider::cancel(std::span<const BlockId> ids) {
    std::vector<ChildProcess*> to_kill;
    {
        std::lock_guard lk(m_);
        for (BlockId id : ids) {
            auto it = blocks_.find(id);
            if (it == blocks_.end())
                throw ProviderError("unknown block id " + std::to_string(id));
            Block& b = it->second;
            switch (b.state) {
                case BlockState::requested:
                case BlockState::pending:
                    std::erase_if(queued_cmds_, [&](auto& p) { return p.first == id; });
                    transition(b, BlockState::cancelled);
                    break;
                case BlockState::running:
                    for (auto& node : b.nodes) {
                        node.terminate();
                        to_kill.push_back(&node);
                    }
                    transition(b, BlockState::cancelled);
                    break;
                default:
                    break;  // already terminal: idempotent
            }
        }
    }
    // Grace period outside the lock, then force.
    auto deadline = std::chrono::steady_clock::now() + kCancelGrace;
    for (auto* node : to_kill) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (left.count() < 0 || !node->wait_for(left)) {
            node->kill();
            node->wait();
        }
    }
}

void Provider::poll() {
    std::lock_guard lk(m_);
    do_poll();
    // Reap finished hosts. A host dying under a running block fails the
    // block; a clean exit of every host completes it (cancelled when the
    // exit was a requested release).
    for (auto& [_, b] : blocks_) {
        if (b.state != BlockState::running) continue;
        bool any_bad = false;
        bool all_exited = !b.nodes.empty();
        for (auto& node : b.nodes) {
            int code = 0;
            if (node.try_wait(&code)) {
                if (code != 0) any_bad = true;
            } else {
                all_exited = false;
            }
        }
        if (b.releasing) {
            if (all_exited) transition(b, BlockState::cancelled);
        } else if (any_bad) {
            transition(b, BlockState::failed);
        } else if (all_exited) {
            transition(b, BlockState::done);
        }
    }
}

Provider::Counts Provider::counts() {
    poll();
    std::lock_guard lk(m_);
    Counts c;
    for (auto& [_, b] : blocks_) {
        if (b.state == BlockState::running) {
            ++c.running;
            ++c.not_terminal;
        } else if (b.state == BlockState::requested || b.state == BlockState::pending) {
            ++c.not_terminal;
        }
    }
    return c;
}

std::vector<pid_t> Provider::node_pids(BlockId id) {
    std::lock_guard lk(m_);
    auto it = blocks_.find(id);
    if (it == blocks_.end()) throw ProviderError("unknown block id " + std::to_string(id));
    std::vector<pid_t> out;
    for (auto& n : it->second.nodes) out.push_back(n.pid());
    return out;
}

std::vector<BlockId> Provider::take_newly_failed() {
    std::lock_guard lk(m_);
    return std::exchange(newly_failed_, {});
}

void Provider::begin_release(BlockId id) {
    std::lock_guard lk(m_);
    auto it = blocks_.find(id);
    if (it == blocks_.end()) throw ProviderError("unknown block id " + std::to_string(id));
    it->second.releasing = true;
}

void LocalProvider::do_submit(Block& b, const WorkerHostCommand& cmd) {
    launch_hosts(b, cmd);
    b.start_time_s = b.submit_time_s;
    transition(b, BlockState::running);
}

SimBatchProvider::SimBatchProvider(ProviderSpec spec, std::filesystem::path run_dir)
    : Provider(std::move(spec), std::move(run_dir)),
      profile_(profile_for(spec_.partition)),
      rng_state_(spec_.queue_delay.seed ? spec_.queue_delay.seed : 0x9e3779b97f4a7c15ULL) {}

SimBatchProvider::PartitionProfile SimBatchProvider::profile_for(const std::string& partition) {
    // Named queue profiles emulating cluster partitions. "normal" is the
    // uncontended default; "busy" adds wait and admits one job at a time.
    if (partition == "busy") return {.extra_delay_s = 2.0, .max_running = 1};
    if (partition == "debug") return {.extra_delay_s = 0.0, .max_running = 1};
    return {.extra_delay_s = 0.0, .max_running = 0};  // "normal" and default
}

double SimBatchProvider::draw_delay() {
    double d = spec_.queue_delay.delay_s + profile_.extra_delay_s;
    if (spec_.queue_delay.jitter_s > 0) {
        // xorshift64*: deterministic under the model's seed.
        rng_state_ ^= rng_state_ >> 12;
        rng_state_ ^= rng_state_ << 25;
        rng_state_ ^= rng_state_ >> 27;
        std::uint64_t r = rng_state_ * 0x2545f4914f6cdd1dULL;
        double unit = static_cast<double>(r >> 11) / static_cast<double>(1ULL << 53);
        d += (unit * 2.0 - 1.0) * spec_.queue_delay.jitter_s;
    }
    return std::max(0.0, d);
}

void SimBatchProvider::do_submit(Block& b, const WorkerHostCommand& cmd) {
    b.job_id = "sim-" + std::to_string(sim_job_seq_++);
    b.start_time_s = b.submit_time_s + draw_delay();
    queued_cmds_.emplace_back(b.id, cmd);
    transition(b, BlockState::pending);
}

void SimBatchProvider::do_poll() {
    // FIFO: start queued jobs whose delay elapsed, respecting the
    // partition's running-job cap.
    double now = now_s();
    while (!queued_cmds_.empty()) {
        auto& [id, cmd] = queued_cmds_.front();
        auto it = blocks_.find(id);
        if (it == blocks_.end()) {
            queued_cmds_.erase(queued_cmds_.begin());
            continue;
        }
        Block& b = it->second;
        if (b.start_time_s > now) break;
        if (profile_.max_running > 0) {
            int running = 0;
            for (auto& [_, blk] : blocks_)
                if (blk.state == BlockState::running) ++running;
            if (running >= profile_.max_running) break;
        }
        launch_hosts(b, cmd);
        transition(b, BlockState::running);
        queued_cmds_.erase(queued_cmds_.begin());
    }
}

void SimBatchProvider::on_transition(const Block&) { dump_queue_locked(); }

void SimBatchProvider::dump_queue_locked() {
    nlohmann::json jobs = nlohmann::json::array();
    for (const auto& [_, b] : blocks_) {
        jobs.push_back({{"job_id", b.job_id},
                        {"submit_time_s", b.submit_time_s},
                        {"start_time_s", b.start_time_s},
                        {"state", to_string(b.state)}});
    }
    std::error_code ec;
    std::filesystem::create_directories(run_dir_, ec);
    std::ofstream out(run_dir_ / "simqueue.json", std::ios::trunc);
    out << nlohmann::json{{"jobs", jobs}}.dump(2) << "\n";
}

std::unique_ptr<Provider> make_provider(const ProviderSpec& spec,
                                        const std::filesystem::path& run_dir) {
    switch (spec.kind) {
        case ProviderSpec::Kind::local:
            return std::make_unique<LocalProvider>(spec, run_dir);
        case ProviderSpec::Kind::sim_batch:
            return std::make_unique<SimBatchProvider>(spec, run_dir);
    }
    throw Error("unknown provider kind");
}

}  // namespace dflow
