#include "dflow/worker_pool_executor.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdlib>

#include "dflow/errors.hpp"

namespace dflow {

namespace {

using AttemptKey = std::pair<std::uint64_t, std::uint64_t>;

std::filesystem::path self_exe_dir() {
    std::error_code ec;
    auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
    if (ec) return {};
    return p.parent_path();
}

std::string find_worker_exe(const std::string& configured) {
    if (!configured.empty()) return configured;
    if (const char* env = std::getenv("DFLOW_WORKER"); env && *env) return env;
    if (auto dir = self_exe_dir(); !dir.empty()) {
        auto sibling = dir / "dflow-worker";
        if (std::filesystem::exists(sibling)) return sibling.string();
    }
    if (const char* path = std::getenv("PATH")) {
        std::string_view rest(path);
        while (!rest.empty()) {
            auto colon = rest.find(':');
            std::string_view dir = rest.substr(0, colon);
            rest = colon == std::string_view::npos ? std::string_view{} : rest.substr(colon + 1);
            if (dir.empty()) continue;
            auto candidate = std::filesystem::path(dir) / "dflow-worker";
            if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
        }
    }
    throw Error("cannot locate dflow-worker (set $DFLOW_WORKER)");
}

}  // namespace

WorkerPoolExecutor::WorkerPoolExecutor(ExecutorSpec spec, std::filesystem::path run_dir,
                                       StrategyParams strategy, Tuning tuning)
    : spec_(std::move(spec)),
      run_dir_(std::move(run_dir)),
      tuning_(std::move(tuning)),
      strategy_(std::make_shared<const StrategyParams>(strategy)) {
    if (!spec_.provider)
        throw Error("worker_pool executor '" + spec_.label + "' has no provider");
    provider_ = make_provider(*spec_.provider, run_dir_);
}

WorkerPoolExecutor::WorkerPoolExecutor(ExecutorSpec spec, std::filesystem::path run_dir,
                                       StrategyParams strategy)
    : WorkerPoolExecutor(std::move(spec), std::move(run_dir), strategy, Tuning{}) {}

WorkerPoolExecutor::~WorkerPoolExecutor() { shutdown(ShutdownMode::cancel); }

void WorkerPoolExecutor::start(CompletionFn on_complete) {
    on_complete_ = std::move(on_complete);
    std::filesystem::create_directories(run_dir_);
    listener_ = TcpListener(spec_.address, 0);
    last_strategy_tick_ = std::chrono::steady_clock::now();
    accept_thread_ = std::thread([this] { accept_loop(); });
    monitor_thread_ = std::thread([this] { monitor_loop(); });
    // Exactly init_blocks submissions happen at startup, before any strategy
    // decision.
    int init = provider_->spec().init_blocks;
    if (init > 0) scale_out(init);
}

WorkerHostCommand WorkerPoolExecutor::host_command() const {
    WorkerHostCommand cmd;
    cmd.argv = {find_worker_exe(tuning_.worker_exe),
                "--connect",
                spec_.address + ":" + std::to_string(listener_.port()),
                "--workers",
                std::to_string(spec_.max_workers),
                "--label",
                spec_.label,
                "--heartbeat-ms",
                std::to_string(tuning_.heartbeat_interval.count())};
    cmd.log_dir = run_dir_ / "workers";
    return cmd;
}

std::vector<BlockId> WorkerPoolExecutor::scale_out(int n_blocks) {
    if (n_blocks <= 0) throw Error("scale_out: n_blocks must be positive");
    auto counts = provider_->counts();
    if (counts.not_terminal + n_blocks > provider_->spec().max_blocks)
        throw ProviderError("scale_out(" + std::to_string(n_blocks) + ") exceeds max_blocks=" +
                            std::to_string(provider_->spec().max_blocks) + " (" +
                            std::to_string(counts.not_terminal) + " active)");
    std::vector<BlockId> ids;
    ids.reserve(static_cast<std::size_t>(n_blocks));
    auto cmd = host_command();
    for (int i = 0; i < n_blocks; ++i) ids.push_back(provider_->submit_block(cmd));
    return ids;
}

void WorkerPoolExecutor::scale_in(std::span<const BlockId> ids) {
    release_blocks(ids, /*graceful=*/true);
}

void WorkerPoolExecutor::release_blocks(std::span<const BlockId> ids, bool graceful) {
    if (ids.empty()) return;
    std::vector<std::shared_ptr<Host>> to_notify;
    {
        std::lock_guard lk(m_);
        for (BlockId id : ids) {
            provider_->begin_release(id);
            block_idle_since_.erase(id);
            for (auto& [_, host] : hosts_)
                if (host->registered && host->block == id && !host->draining) {
                    host->draining = true;
                    to_notify.push_back(host);
                }
        }
    }
    if (graceful) {
        // Workers finish their in-flight tasks, then exit; the provider
        // moves the block to cancelled once its hosts are gone.
        for (auto& host : to_notify)
            send_frame(host, wire::Frame{wire::FrameKind::shutdown, 0, {}});
    } else {
        std::vector<BlockId> v(ids.begin(), ids.end());
        provider_->cancel(v);
    }
}

void WorkerPoolExecutor::execute(TaskPayload task) {
    if (stopping_) {
        on_complete_(task.id, task.attempt,
                     Outcome::error(ErrorKind::cancelled, "executor shutting down"));
        return;
    }
    std::lock_guard lk(m_);
    queue_.push_back(std::move(task));
    pump_dispatch_locked();
}

bool WorkerPoolExecutor::send_frame(const std::shared_ptr<Host>& host, const wire::Frame& f) {
    std::lock_guard lk(host->write_mu);
    if (!host->socket.valid()) return false;
    return host->socket.write_all(wire::encode_frame(f));
}

void WorkerPoolExecutor::pump_dispatch_locked() {
    while (!queue_.empty()) {
        // FIFO dispatch to the least-loaded host with a free slot.
        std::shared_ptr<Host> best;
        for (auto& [_, host] : hosts_) {
            if (!host->registered || host->draining || host->dead) continue;
            if (static_cast<int>(host->in_flight.size()) >= host->slots) continue;
            if (!best || host->in_flight.size() < best->in_flight.size()) best = host;
        }
        if (!best) return;

        TaskPayload payload = std::move(queue_.front());
        queue_.pop_front();
        AttemptKey key{payload.id.value, payload.attempt};
        outstanding_[key] = best->conn_id;
        best->in_flight.emplace(key, payload.id);
        block_idle_since_.erase(best->block);

        wire::Frame frame{wire::FrameKind::task, payload.id.value,
                          wire::encode_value(payload_to_value(payload))};
        if (!send_frame(best, frame)) {
            // Connection went away between accept and write: requeue the
            // attempt (it never started) and let the reader clean up.
            outstanding_.erase(key);
            best->in_flight.erase(key);
            best->dead = true;
            queue_.push_front(std::move(payload));
            continue;
        }
    }
}

void WorkerPoolExecutor::accept_loop() {
    while (!stopping_) {
        TcpSocket sock = listener_.accept();
        if (!sock.valid()) {
            if (stopping_) return;
            continue;
        }
        auto host = std::make_shared<Host>();
        host->socket = std::move(sock);
        host->last_rx = std::chrono::steady_clock::now();
        {
            std::lock_guard lk(m_);
            host->conn_id = next_conn_id_++;
            hosts_[host->conn_id] = host;
        }
        host->reader = std::thread([this, host] { reader_loop(host); });
    }
}

void WorkerPoolExecutor::reader_loop(std::shared_ptr<Host> host) {
    wire::FrameReader reader;
    std::vector<std::uint8_t> buf(64 * 1024);
    try {
        while (true) {
            auto n = host->socket.read_some(buf);
            if (n <= 0) break;
            reader.feed(std::span(buf.data(), static_cast<std::size_t>(n)));
            while (auto frame = reader.next()) handle_frame(host, *frame);
        }
    } catch (const std::exception&) {
        // Malformed traffic is treated as a lost host.
    }
    host_lost(host);
}

void WorkerPoolExecutor::handle_frame(const std::shared_ptr<Host>& host, const wire::Frame& f) {
    host->last_rx = std::chrono::steady_clock::now();
    switch (f.kind) {
        case wire::FrameKind::heartbeat: {
            if (!f.payload.empty() && !host->registered) {
                // Registration: first heartbeat carries host identity.
                const auto& m = wire::decode_value(f.payload).as<ArgMap>();
                std::lock_guard lk(m_);
                host->block = static_cast<BlockId>(m.at("block_id").as_int());
                host->node = static_cast<int>(m.at("node").as_int());
                host->slots = static_cast<int>(m.at("workers").as_int());
                host->registered = true;
                block_idle_since_.try_emplace(host->block, std::chrono::steady_clock::now());
                pump_dispatch_locked();
            }
            return;
        }
        case wire::FrameKind::result: {
            const auto& m = wire::decode_value(f.payload).as<ArgMap>();
            auto attempt = static_cast<std::uint64_t>(m.at("attempt").as_int());
            Outcome outcome = wire::outcome_from_value(m.at("outcome"));
            deliver({f.task_id, attempt}, TaskId(f.task_id), std::move(outcome));
            return;
        }
        default:
            return;  // task/shutdown frames never flow worker -> executor
    }
}

void WorkerPoolExecutor::deliver(AttemptKey key, TaskId id, Outcome o) {
    bool owned = false;
    {
        std::lock_guard lk(m_);
        owned = outstanding_.erase(key) > 0;
        if (owned) {
            for (auto& [_, host] : hosts_) {
                if (host->in_flight.erase(key)) {
                    bool block_busy = false;
                    for (auto& [_, other] : hosts_)
                        if (other->block == host->block && !other->in_flight.empty())
                            block_busy = true;
                    if (!block_busy)
                        block_idle_since_.try_emplace(host->block,
                                                      std::chrono::steady_clock::now());
                    break;
                }
            }
            pump_dispatch_locked();
        }
    }
    // Late frames for attempts already failed over are dropped: exactly one
    // completion event per attempt.
    if (owned) on_complete_(id, key.second, std::move(o));
}

void WorkerPoolExecutor::host_lost(const std::shared_ptr<Host>& host) {
    std::vector<std::pair<AttemptKey, TaskId>> orphaned;
    {
        std::lock_guard lk(m_);
        if (!hosts_.count(host->conn_id)) return;
        hosts_.erase(host->conn_id);
        host->dead = true;
        for (const auto& [key, task] : host->in_flight)
            if (outstanding_.erase(key)) orphaned.emplace_back(key, task);
        host->in_flight.clear();
        pump_dispatch_locked();
        // Reader threads cannot join themselves; shutdown() reaps them.
        retired_.push_back(host);
    }
    host->socket.shutdown_and_close();
    for (auto& [key, task] : orphaned)
        on_complete_(task, key.second,
                     Outcome::error(ErrorKind::executor_down,
                                    "worker host (block " + std::to_string(host->block) +
                                        ", node " + std::to_string(host->node) + ") lost"));
}

void WorkerPoolExecutor::monitor_loop() {
    while (!stopping_) {
        std::this_thread::sleep_for(tuning_.monitor_tick);
        if (stopping_) break;

        // Heartbeat watchdog: a silent host is presumed dead; closing its
        // socket pushes the cleanup through the reader path.
        auto deadline = tuning_.heartbeat_interval * tuning_.missed_heartbeat_limit;
        std::vector<std::shared_ptr<Host>> silent;
        {
            std::lock_guard lk(m_);
            auto now = std::chrono::steady_clock::now();
            for (auto& [_, host] : hosts_)
                if (now - host->last_rx > deadline) silent.push_back(host);
        }
        for (auto& host : silent) host->socket.shutdown_and_close();

        provider_->poll();

        // Blocks that failed (a host died) stop receiving work; their
        // surviving hosts drain gracefully.
        auto failed = provider_->take_newly_failed();
        if (!failed.empty()) {
            std::vector<std::shared_ptr<Host>> drain;
            {
                std::lock_guard lk(m_);
                for (BlockId id : failed) {
                    block_idle_since_.erase(id);
                    for (auto& [_, host] : hosts_)
                        if (host->registered && host->block == id && !host->draining) {
                            host->draining = true;
                            drain.push_back(host);
                        }
                }
            }
            for (auto& host : drain)
                send_frame(host, wire::Frame{wire::FrameKind::shutdown, 0, {}});
        }

        auto strategy = strategy_snapshot();
        auto now = std::chrono::steady_clock::now();
        if (now - last_strategy_tick_ >=
            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(strategy->poll_interval_s))) {
            last_strategy_tick_ = now;
            strategy_tick();
        }
    }
}

int WorkerPoolExecutor::effective_max_blocks(
    const std::shared_ptr<const StrategyParams>& s) const {
    return s->max_blocks_override.value_or(provider_->spec().max_blocks);
}

std::shared_ptr<const StrategyParams> WorkerPoolExecutor::strategy_snapshot() {
    std::lock_guard lk(strategy_mu_);
    return strategy_;
}

void WorkerPoolExecutor::strategy_tick() {
    auto strategy = strategy_snapshot();
    auto counts = provider_->counts();

    std::size_t queued = 0;
    std::size_t live_slots = 0;
    std::vector<BlockId> idle_candidates;
    {
        std::lock_guard lk(m_);
        queued = queue_.size();
        for (auto& [_, host] : hosts_)
            if (host->registered && !host->draining && !host->dead)
                live_slots += static_cast<std::size_t>(host->slots);
        auto now = std::chrono::steady_clock::now();
        auto idle_limit = std::chrono::duration<double>(strategy->idle_timeout_s);
        for (auto& [block, since] : block_idle_since_)
            if (now - since >= idle_limit) idle_candidates.push_back(block);
    }

    // Backlog pressure: one block per tick while the queue outruns workers.
    if (queued > live_slots && counts.not_terminal < effective_max_blocks(strategy)) {
        try {
            scale_out(1);
        } catch (const ProviderError&) {
            // Raced against max_blocks; strategy retries next tick.
        }
    }

    // Idle release, keeping at least min_blocks running.
    if (!idle_candidates.empty()) {
        int releasable = counts.running - provider_->spec().min_blocks;
        if (releasable > 0) {
            std::sort(idle_candidates.begin(), idle_candidates.end());
            if (static_cast<int>(idle_candidates.size()) > releasable)
                idle_candidates.resize(static_cast<std::size_t>(releasable));
            // Only running blocks can be drained.
            std::vector<BlockId> to_release;
            for (BlockId id : idle_candidates) {
                auto st = provider_->status(std::span(&id, 1));
                if (st[0] == BlockState::running) to_release.push_back(id);
            }
            if (!to_release.empty()) scale_in(to_release);
        }
    }
}

ExecutorStats WorkerPoolExecutor::stats() {
    auto counts = provider_->counts();
    std::lock_guard lk(m_);
    ExecutorStats s;
    s.queued = queue_.size();
    s.active = outstanding_.size();
    for (auto& [_, host] : hosts_)
        if (host->registered && !host->draining && !host->dead)
            s.capacity += static_cast<std::size_t>(host->slots);
    s.blocks_running = counts.running;
    s.blocks_not_terminal = counts.not_terminal;
    return s;
}

std::size_t WorkerPoolExecutor::connected_hosts() {
    std::lock_guard lk(m_);
    std::size_t n = 0;
    for (auto& [_, host] : hosts_)
        if (host->registered && !host->dead) ++n;
    return n;
}

void WorkerPoolExecutor::update_strategy(const StrategyParams& s) {
    std::lock_guard lk(strategy_mu_);
    strategy_ = std::make_shared<const StrategyParams>(s);
}

void WorkerPoolExecutor::shutdown(ShutdownMode mode) {
    if (stopping_.exchange(true)) return;

    if (mode == ShutdownMode::drain) {
        // Finish everything already accepted.
        while (true) {
            {
                std::lock_guard lk(m_);
                if (queue_.empty() && outstanding_.empty()) break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
    }

    std::vector<std::pair<AttemptKey, TaskId>> dropped;
    std::vector<std::shared_ptr<Host>> hosts;
    {
        std::lock_guard lk(m_);
        for (auto& t : queue_) dropped.push_back({{t.id.value, t.attempt}, t.id});
        queue_.clear();
        for (auto& [key, _] : outstanding_) dropped.push_back({key, TaskId(key.first)});
        outstanding_.clear();
        for (auto& [_, host] : hosts_) hosts.push_back(host);
    }
    for (auto& [key, id] : dropped)
        on_complete_(id, key.second, Outcome::error(ErrorKind::cancelled, "executor shutdown"));

    // Ask hosts to exit, then release every live block through the provider
    // (SIGTERM + grace + SIGKILL catches any that ignore the frame).
    for (auto& host : hosts) send_frame(host, wire::Frame{wire::FrameKind::shutdown, 0, {}});
    std::vector<BlockId> live;
    provider_->poll();
    for (auto& host : hosts)
        if (host->registered) live.push_back(host->block);
    std::sort(live.begin(), live.end());
    live.erase(std::unique(live.begin(), live.end()), live.end());
    for (BlockId id : live) {
        try {
            provider_->begin_release(id);
        } catch (const ProviderError&) {
        }
    }
    if (mode == ShutdownMode::drain) {
        // Give hosts a moment to exit cleanly before the hard cancel.
        auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
        while (std::chrono::steady_clock::now() < deadline) {
            provider_->poll();
            if (provider_->counts().not_terminal == 0) break;
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
    }
    std::vector<BlockId> remaining;
    {
        provider_->poll();
        for (BlockId id : live)
            if (provider_->status(std::span(&id, 1))[0] == BlockState::running)
                remaining.push_back(id);
    }
    if (!remaining.empty()) provider_->cancel(remaining);

    listener_.close();
    if (accept_thread_.joinable()) accept_thread_.join();
    if (monitor_thread_.joinable()) monitor_thread_.join();
    for (auto& host : hosts) host->socket.shutdown_and_close();
    std::vector<std::shared_ptr<Host>> retired;
    {
        std::lock_guard lk(m_);
        hosts_.clear();
        retired.swap(retired_);
    }
    for (auto& host : hosts)
        if (host->reader.joinable()) host->reader.join();
    for (auto& host : retired)
        if (host->reader.joinable()) host->reader.join();
}

}  // namespace dflow
