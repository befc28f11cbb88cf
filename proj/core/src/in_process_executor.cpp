#include "dflow/in_process_executor.hpp"

#include <fstream>

#include "dflow/process.hpp"

namespace dflow {

namespace {

Outcome run_native(const TaskPayload& p) {
    const NativeFn* fn = nullptr;
    if (p.local_callable) {
        fn = &p.local_callable;
    } else {
        fn = AppRegistry::instance().find(p.app_name);
        if (!fn)
            return Outcome::error(ErrorKind::app_error,
                                  "native app '" + p.app_name + "' is not registered here");
    }
    AppArgs call_args{p.args, p.kwargs, p.inputs, p.outputs};
    try {
        return Outcome::value((*fn)(call_args));
    } catch (const std::exception& e) {
        return Outcome::error(ErrorKind::app_error, std::string(e.what()));
    } catch (...) {
        return Outcome::error(ErrorKind::app_error, "unknown exception from app '" + p.app_name + "'");
    }
}

Outcome run_shell_task(const TaskPayload& p) {
    if (p.command.empty())
        return Outcome::error(ErrorKind::app_error, "rendered command is empty");
    std::error_code ec;
    if (!p.stdout_path.empty())
        std::filesystem::create_directories(p.stdout_path.parent_path(), ec);
    int code = run_shell(p.command, p.stdout_path, p.stderr_path);
    if (code != 0) {
        ErrorInfo e;
        e.kind = ErrorKind::exit_code;
        e.exit_code = code;
        e.message = "command exited with " + std::to_string(code) + ": " + p.command;
        return Outcome::error(std::move(e));
    }
    // Success resolves to the captured stdout file, mirroring ShellResult.
    ArgMap result;
    result.emplace("exit_code", ArgValue(std::int64_t(0)));
    FileRef out_file(p.stdout_path.string());
    out_file.set_staged_path(p.stdout_path);
    FileRef err_file(p.stderr_path.string());
    err_file.set_staged_path(p.stderr_path);
    result.emplace("stdout", ArgValue(std::move(out_file)));
    result.emplace("stderr", ArgValue(std::move(err_file)));
    return Outcome::value(ArgValue(std::move(result)));
}

}  // namespace

Outcome execute_payload(const TaskPayload& p) {
    return p.kind == AppSpec::Kind::native ? run_native(p) : run_shell_task(p);
}

InProcessExecutor::InProcessExecutor(std::string label, int max_workers)
    : label_(std::move(label)), max_workers_(max_workers) {}

InProcessExecutor::~InProcessExecutor() { shutdown(ShutdownMode::drain); }

void InProcessExecutor::start(CompletionFn on_complete) {
    on_complete_ = std::move(on_complete);
    workers_.reserve(static_cast<std::size_t>(max_workers_));
    for (int i = 0; i < max_workers_; ++i)
        workers_.emplace_back([this] { worker_loop(); });
}

void InProcessExecutor::execute(TaskPayload task) {
    {
        std::lock_guard lk(m_);
        if (!stopping_) {
            queue_.push_back(std::move(task));
            cv_.notify_one();
            return;
        }
    }
    on_complete_(task.id, task.attempt, Outcome::error(ErrorKind::cancelled, "executor shutdown"));
}

void InProcessExecutor::worker_loop() {
    while (true) {
        TaskPayload task;
        {
            std::unique_lock lk(m_);
            cv_.wait(lk, [&] { return stopping_ || !queue_.empty(); });
            if (queue_.empty()) return;  // stopping and drained
            task = std::move(queue_.front());
            queue_.pop_front();
            ++active_;
        }
        Outcome outcome = execute_payload(task);
        {
            std::lock_guard lk(m_);
            --active_;
        }
        on_complete_(task.id, task.attempt, std::move(outcome));
    }
}

void InProcessExecutor::shutdown(ShutdownMode mode) {
    std::deque<TaskPayload> dropped;
    {
        std::lock_guard lk(m_);
        if (stopping_ && workers_.empty()) return;
        stopping_ = true;
        if (mode == ShutdownMode::cancel) dropped.swap(queue_);
    }
    cv_.notify_all();
    for (auto& t : dropped)
        on_complete_(t.id, t.attempt, Outcome::error(ErrorKind::cancelled, "executor shutdown"));
    for (auto& w : workers_)
        if (w.joinable()) w.join();
    workers_.clear();
}

ExecutorStats InProcessExecutor::stats() {
    std::lock_guard lk(m_);
    ExecutorStats s;
    s.queued = queue_.size();
    s.active = active_;
    s.capacity = static_cast<std::size_t>(max_workers_);
    return s;
}

}  // namespace dflow
