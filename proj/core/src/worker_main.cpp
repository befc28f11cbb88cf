#include "dflow/worker_main.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "dflow/executor.hpp"
#include "dflow/tcp.hpp"
#include "dflow/wire.hpp"

namespace dflow {

namespace {

struct WorkerOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    int workers = 1;
    std::string label;
    std::int64_t block_id = 0;
    int node = 0;
    std::chrono::milliseconds heartbeat{5000};
};

bool parse_options(int argc, char** argv, WorkerOptions& opts, std::string& err) {
    auto need = [&](int i) -> const char* {
        if (i + 1 >= argc) return nullptr;
        return argv[i + 1];
    };
    for (int i = 1; i < argc; i += 2) {
        std::string_view flag = argv[i];
        const char* value = need(i);
        if (!value) {
            err = "missing value for " + std::string(flag);
            return false;
        }
        if (flag == "--connect") {
            std::string_view hp = value;
            auto colon = hp.rfind(':');
            if (colon == std::string_view::npos) {
                err = "--connect expects host:port";
                return false;
            }
            opts.host = std::string(hp.substr(0, colon));
            opts.port = static_cast<std::uint16_t>(std::stoi(std::string(hp.substr(colon + 1))));
        } else if (flag == "--workers") {
            opts.workers = std::stoi(value);
        } else if (flag == "--label") {
            opts.label = value;
        } else if (flag == "--block-id") {
            opts.block_id = std::stoll(value);
        } else if (flag == "--node") {
            opts.node = std::stoi(value);
        } else if (flag == "--heartbeat-ms") {
            opts.heartbeat = std::chrono::milliseconds(std::stoll(value));
        } else {
            err = "unknown flag " + std::string(flag);
            return false;
        }
    }
    if (opts.port == 0) {
        err = "--connect is required";
        return false;
    }
    return true;
}

class WorkerHost {
  public:
    WorkerHost(WorkerOptions opts, TcpSocket socket)
        : opts_(std::move(opts)), socket_(std::move(socket)) {}

    int run() {
        send_hello();
        for (int i = 0; i < opts_.workers; ++i)
            threads_.emplace_back([this] { task_loop(); });
        heartbeat_thread_ = std::thread([this] { heartbeat_loop(); });

        read_loop();

        {
            std::lock_guard lk(m_);
            stopping_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
        stop_heartbeat_ = true;
        hb_cv_.notify_all();
        heartbeat_thread_.join();
        socket_.shutdown_and_close();
        return 0;
    }

  private:
    void send_hello() {
        ArgMap m;
        m.emplace("block_id", ArgValue(opts_.block_id));
        m.emplace("node", ArgValue(static_cast<std::int64_t>(opts_.node)));
        m.emplace("workers", ArgValue(static_cast<std::int64_t>(opts_.workers)));
        send(wire::Frame{wire::FrameKind::heartbeat, 0,
                         wire::encode_value(ArgValue(std::move(m)))});
    }

    void send(const wire::Frame& f) {
        std::lock_guard lk(write_mu_);
        if (!socket_.write_all(wire::encode_frame(f))) connection_lost_ = true;
    }

    void heartbeat_loop() {
        std::unique_lock lk(hb_mu_);
        while (!stop_heartbeat_) {
            if (hb_cv_.wait_for(lk, opts_.heartbeat, [&] { return stop_heartbeat_.load(); }))
                return;
            send(wire::Frame{wire::FrameKind::heartbeat, 0, {}});
        }
    }

    void read_loop() {
        wire::FrameReader reader;
        std::vector<std::uint8_t> buf(64 * 1024);
        while (!connection_lost_) {
            auto n = socket_.read_some(buf);
            if (n <= 0) {
                // Executor gone: abandon everything, the process exits.
                connection_lost_ = true;
                return;
            }
            reader.feed(std::span(buf.data(), static_cast<std::size_t>(n)));
            try {
                while (auto frame = reader.next()) {
                    if (frame->kind == wire::FrameKind::task) {
                        {
                            std::lock_guard lk(m_);
                            queue_.push_back(std::move(frame->payload));
                        }
                        cv_.notify_one();
                    } else if (frame->kind == wire::FrameKind::shutdown) {
                        // Drain: finish queued + in-flight tasks, then exit.
                        std::unique_lock lk(m_);
                        draining_ = true;
                        cv_.notify_all();
                        done_cv_.wait(lk, [&] { return queue_.empty() && in_flight_ == 0; });
                        return;
                    }
                }
            } catch (const std::exception& e) {
                std::cerr << "worker: protocol error: " << e.what() << "\n";
                connection_lost_ = true;
                return;
            }
        }
    }

    void task_loop() {
        while (true) {
            std::vector<std::uint8_t> payload_bytes;
            {
                std::unique_lock lk(m_);
                cv_.wait(lk, [&] { return stopping_ || draining_ || !queue_.empty(); });
                if (queue_.empty()) {
                    if (stopping_ || draining_) return;
                    continue;
                }
                payload_bytes = std::move(queue_.front());
                queue_.pop_front();
                ++in_flight_;
            }

            std::uint64_t task_id = 0;
            std::uint64_t attempt = 0;
            Outcome outcome = Outcome::error(ErrorKind::app_error, "worker failed to decode task");
            try {
                TaskPayload payload = payload_from_value(wire::decode_value(payload_bytes));
                task_id = payload.id.value;
                attempt = payload.attempt;
                outcome = execute_payload(payload);
            } catch (const std::exception& e) {
                outcome = Outcome::error(ErrorKind::app_error,
                                         std::string("worker execution error: ") + e.what());
            }

            ArgMap m;
            m.emplace("attempt", ArgValue(static_cast<std::int64_t>(attempt)));
            m.emplace("outcome", wire::outcome_to_value(outcome));
            send(wire::Frame{wire::FrameKind::result, task_id,
                             wire::encode_value(ArgValue(std::move(m)))});

            {
                std::lock_guard lk(m_);
                --in_flight_;
            }
            done_cv_.notify_all();
        }
    }

    WorkerOptions opts_;
    TcpSocket socket_;
    std::mutex write_mu_;

    std::mutex m_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    std::deque<std::vector<std::uint8_t>> queue_;
    int in_flight_ = 0;
    bool draining_ = false;
    bool stopping_ = false;
    std::atomic<bool> connection_lost_{false};

    std::mutex hb_mu_;
    std::condition_variable hb_cv_;
    std::atomic<bool> stop_heartbeat_{false};
    std::thread heartbeat_thread_;
    std::vector<std::thread> threads_;
};

}  // namespace

int worker_main(int argc, char** argv) {
    WorkerOptions opts;
    std::string err;
    if (!parse_options(argc, argv, opts, err)) {
        std::cerr << "dflow-worker: " << err << "\n";
        return 2;
    }
    try {
        TcpSocket socket = tcp_connect(opts.host, opts.port);
        WorkerHost host(std::move(opts), std::move(socket));
        return host.run();
    } catch (const std::exception& e) {
        std::cerr << "dflow-worker: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace dflow
