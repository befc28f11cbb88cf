#include "dflow/kernel.hpp"

#include <algorithm>
#include <cassert>
#include <ctime>
#include <sstream>

#include "dflow/config.hpp"
#include "dflow/staging.hpp"
#include "dflow/worker_pool_executor.hpp"

namespace dflow {

namespace {

std::string iso_timestamp() {
    using namespace std::chrono;
    auto now = system_clock::now();
    auto ms = duration_cast<milliseconds>(now.time_since_epoch()) % 1000;
    std::time_t t = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms.count()));
    return out;
}

// Recursively stages every FileRef in the tree (inputs of the attempt).
ArgValue stage_tree(const ArgValue& v, const StagingContext& ctx) {
    const auto& st = v.storage();
    if (const auto* f = std::get_if<FileRef>(&st)) return ArgValue(stage_in(*f, ctx));
    if (const auto* list = std::get_if<ArgList>(&st)) {
        ArgList out;
        out.reserve(list->size());
        for (const auto& item : *list) out.push_back(stage_tree(item, ctx));
        return ArgValue(std::move(out));
    }
    if (const auto* map = std::get_if<ArgMap>(&st)) {
        ArgMap out;
        for (const auto& [k, item] : *map) out.emplace(k, stage_tree(item, ctx));
        return ArgValue(std::move(out));
    }
    return v;
}

// Relative local paths resolve against the kernel's run_dir when the task
// record is constructed.
ArgValue rebase_tree(const ArgValue& v, const std::filesystem::path& base) {
    const auto& st = v.storage();
    if (const auto* f = std::get_if<FileRef>(&st)) {
        if (f->scheme() == FileScheme::local && !f->is_staged() &&
            std::filesystem::path(f->source()).is_relative())
            return ArgValue(FileRef(f->source(), base));
        return v;
    }
    if (const auto* list = std::get_if<ArgList>(&st)) {
        ArgList out;
        out.reserve(list->size());
        for (const auto& item : *list) out.push_back(rebase_tree(item, base));
        return ArgValue(std::move(out));
    }
    if (const auto* map = std::get_if<ArgMap>(&st)) {
        ArgMap out;
        for (const auto& [k, item] : *map) out.emplace(k, rebase_tree(item, base));
        return ArgValue(std::move(out));
    }
    return v;
}

void collect_data_refs(const ArgValue& v, std::vector<DataFutureRef>& out) {
    const auto& st = v.storage();
    if (const auto* d = std::get_if<DataFutureRef>(&st)) {
        out.push_back(*d);
    } else if (const auto* list = std::get_if<ArgList>(&st)) {
        for (const auto& item : *list) collect_data_refs(item, out);
    } else if (const auto* map = std::get_if<ArgMap>(&st)) {
        for (const auto& [_, item] : *map) collect_data_refs(item, out);
    }
}

bool retryable(const ErrorInfo& e) {
    return e.kind != ErrorKind::cancelled && e.kind != ErrorKind::dep_failure;
}

}  // namespace

Kernel::Kernel(KernelConfig config, std::vector<std::shared_ptr<Executor>> executors)
    : config_(std::move(config)), executors_(std::move(executors)) {
    if (executors_.empty()) throw Error("kernel needs at least one executor");
    config_.run_dir = std::filesystem::absolute(config_.run_dir);
    std::filesystem::create_directories(config_.run_dir / "tasks");
    for (const auto& ex : executors_) {
        if (!executors_by_label_.emplace(ex->label(), ex).second)
            throw Error("duplicate executor label '" + ex->label() + "'");
    }

    log_.open(config_.run_dir / "kernel.log", std::ios::app);

    event_thread_ = std::thread([this] { event_loop(); });
    for (int i = 0; i < std::max(1, config_.staging_threads); ++i)
        staging_threads_.emplace_back([this] { staging_loop(); });

    for (const auto& ex : executors_)
        ex->start([this](TaskId id, std::uint64_t attempt, Outcome outcome) {
            post_event([this, id, attempt, o = std::move(outcome)]() mutable {
                process_completion(id, attempt, std::move(o));
            });
        });
}

Kernel::~Kernel() {
    try {
        shutdown(ShutdownMode::drain);
    } catch (...) {
    }
}

void Kernel::set_transition_hook(TransitionHook hook) {
    std::lock_guard lk(graph_mu_);
    hook_ = std::move(hook);
}

std::shared_ptr<Executor> Kernel::executor(const std::string& label) const {
    auto it = executors_by_label_.find(label);
    return it == executors_by_label_.end() ? nullptr : it->second;
}

void Kernel::log_transition(TaskId id, TaskState from, TaskState to, const std::string& label) {
    std::lock_guard lk(log_mu_);
    if (!log_.is_open()) return;
    log_ << iso_timestamp() << '\t' << id.value << '\t' << to_string(from) << "->"
         << to_string(to) << '\t' << label << '\n';
}

void Kernel::transition_locked(TaskEntry& e, TaskState to) {
    TaskState from = e.record.state;
    if (!legal_transition(from, to))
        throw std::logic_error(std::string("illegal task transition ") + to_string(from) +
                               " -> " + to_string(to) + " (task " +
                               std::to_string(e.record.id.value) + ")");
    e.record.state = to;
    log_transition(e.record.id, from, to, e.record.executor_label);
    if (hook_) hook_(e.record.id, from, to);
    if (is_terminal(to)) {
        e.terminal = std::chrono::steady_clock::now();
        assert(non_terminal_ > 0);
        --non_terminal_;
        if (non_terminal_ == 0) all_terminal_cv_.notify_all();
    }
}

AppFuture Kernel::invoke(const AppSpec& app, ArgList args, ArgMap kwargs,
                         std::vector<FileRef> outputs) {
    return submit(TaskSubmission{app, std::move(args), std::move(kwargs), std::move(outputs)});
}

AppFuture Kernel::submit(TaskSubmission submission) {
    std::lock_guard lk(graph_mu_);
    if (phase_ != Phase::running)
        throw ShutdownError("kernel is shutting down; submissions are closed");

    auto e = std::make_unique<TaskEntry>();
    TaskEntry& entry = *e;
    entry.record.id = TaskId(tasks_.size());
    entry.record.app = submission.app;
    entry.record.args.reserve(submission.args.size());
    for (auto& a : submission.args)
        entry.record.args.push_back(rebase_tree(a, config_.run_dir));
    for (auto& [k, v] : submission.kwargs)
        entry.record.kwargs.emplace(k, rebase_tree(v, config_.run_dir));

    // `outputs` may arrive as the reserved kwarg instead of the parameter.
    std::vector<FileRef> outputs = std::move(submission.outputs);
    if (auto it = entry.record.kwargs.find("outputs"); it != entry.record.kwargs.end()) {
        if (outputs.empty() && it->second.is<ArgList>()) {
            for (const auto& item : it->second.as<ArgList>()) {
                if (!item.is<FileRef>()) throw Error("'outputs' entries must be files");
                outputs.push_back(item.as<FileRef>());
            }
        }
        entry.record.kwargs.erase(it);
    }
    for (auto& f : outputs)
        entry.record.outputs.push_back(
            f.scheme() == FileScheme::local && !f.is_staged() &&
                    std::filesystem::path(f.source()).is_relative()
                ? FileRef(f.source(), config_.run_dir)
                : f);

    entry.record.retries_left =
        submission.app.retry_override ? *submission.app.retry_override : config_.retries;
    if (entry.record.retries_left < 0) entry.record.retries_left = 0;

    std::string label = submission.app.executor_label.value_or(executors_.front()->label());
    if (!executors_by_label_.count(label))
        throw Error("unknown executor label '" + label + "'");
    entry.record.executor_label = label;

    entry.record.depends_on = scan_dependencies(entry.record.args, entry.record.kwargs);
    for (const auto& a : entry.record.args) collect_data_refs(a, entry.data_refs);
    for (const auto& [_, v] : entry.record.kwargs) collect_data_refs(v, entry.data_refs);

    entry.app_slot = std::make_shared<detail::OutcomeSlot>();
    std::vector<DataFuture> data_futures;
    data_futures.reserve(entry.record.outputs.size());
    for (const auto& f : entry.record.outputs) {
        DataFuture df(entry.record.id, f);
        entry.output_slots.push_back(df.slot());
        data_futures.push_back(std::move(df));
    }
    entry.submitted = std::chrono::steady_clock::now();

    AppFuture future(entry.record.id, entry.app_slot, std::move(data_futures));

    bool upstream_failed = false;
    for (TaskId dep : entry.record.depends_on) {
        if (dep.value >= tasks_.size())
            throw Error("dependency on unknown task " + std::to_string(dep.value));
        TaskEntry& parent = *tasks_[dep.value];
        if (is_terminal(parent.record.state)) {
            if (parent.record.state != TaskState::done) upstream_failed = true;
        } else {
            parent.dependents.push_back(entry.record.id);
            entry.unresolved.insert(dep);
        }
    }

    ++non_terminal_;
    tasks_.push_back(std::move(e));

    TaskEntry& reg = *tasks_.back();
    if (upstream_failed) {
        mark_dep_failed_locked(reg, collect_failure_roots_locked(reg));
    } else if (reg.unresolved.empty()) {
        promote_locked(reg);
    }
    return future;
}

std::vector<TaskId> Kernel::collect_failure_roots_locked(const TaskEntry& e) {
    // Root causes: upstream tasks that terminally *failed*, found
    // transitively (dep_failed parents contribute their own roots). A
    // produced-but-missing output contributes its producer.
    std::set<TaskId> roots;
    for (TaskId dep : e.record.depends_on) {
        const TaskEntry& parent = *tasks_[dep.value];
        switch (parent.record.state) {
            case TaskState::failed:
                roots.insert(dep);
                break;
            case TaskState::dep_failed:
                if (parent.record.result_slot && !parent.record.result_slot->ok())
                    for (TaskId r : parent.record.result_slot->get_error().failed_tasks)
                        roots.insert(r);
                break;
            default:
                break;
        }
    }
    for (const auto& d : e.data_refs) {
        const TaskEntry& parent = *tasks_[d.task.value];
        if (parent.record.state == TaskState::done &&
            d.output_index < parent.output_outcomes.size() &&
            !parent.output_outcomes[d.output_index].ok())
            roots.insert(d.task);
    }
    return {roots.begin(), roots.end()};
}

void Kernel::mark_dep_failed_locked(TaskEntry& e, std::vector<TaskId> roots) {
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    ErrorInfo err;
    err.kind = ErrorKind::dep_failure;
    err.failed_tasks = roots;
    {
        std::ostringstream os;
        os << "upstream task(s) failed:";
        for (TaskId r : roots) os << ' ' << r.value;
        err.message = os.str();
    }
    transition_locked(e, TaskState::dep_failed);
    finish_locked(e, TaskState::dep_failed, Outcome::error(std::move(err)));
}

// Writes the result slot, resolves futures, and notifies dependents.
// `transition_locked` to the terminal state must already have happened for
// dep_failed (its transition source varies); done/failed transition here.
void Kernel::finish_locked(TaskEntry& e, TaskState terminal_state, Outcome outcome) {
    assert(e.record.state == terminal_state);
    assert(!e.record.result_slot && "result_slot is written exactly once");
    e.record.result_slot = outcome;

    // Resolve output DataFutures. On success output_outcomes was already
    // filled by the completion path; on failure every output carries the
    // task's error.
    if (e.output_outcomes.size() != e.output_slots.size()) {
        e.output_outcomes.assign(e.output_slots.size(), outcome);
    }
    for (std::size_t i = 0; i < e.output_slots.size(); ++i)
        e.output_slots[i]->set(e.output_outcomes[i]);

    e.app_slot->set(std::move(outcome));

    bool ok = terminal_state == TaskState::done;
    for (TaskId dep_id : e.dependents) {
        TaskEntry& d = *tasks_[dep_id.value];
        if (is_terminal(d.record.state)) continue;
        d.unresolved.erase(e.record.id);
        if (!ok) {
            mark_dep_failed_locked(d, collect_failure_roots_locked(d));
        } else if (d.unresolved.empty()) {
            promote_locked(d);
        }
    }
}

void Kernel::promote_locked(TaskEntry& e) {
    // All dependencies are terminal and none failed. Outputs referenced via
    // DataFutureRef must actually have been produced.
    for (const auto& d : e.data_refs) {
        const TaskEntry& parent = *tasks_[d.task.value];
        if (d.output_index >= parent.output_outcomes.size() ||
            !parent.output_outcomes[d.output_index].ok()) {
            mark_dep_failed_locked(e, collect_failure_roots_locked(e));
            return;
        }
    }
    transition_locked(e, TaskState::launchable);
    launch_locked(e);
}

void Kernel::launch_locked(TaskEntry& e) {
    transition_locked(e, TaskState::running);
    ++e.attempts_made;
    TaskId id = e.record.id;
    std::uint64_t attempt = e.attempt;
    ResolvedDeps resolved = snapshot_deps_locked(e);
    post_staging([this, id, attempt, resolved = std::move(resolved)]() mutable {
        prepare_and_execute(id, attempt, std::move(resolved));
    });
}

ResolvedDeps Kernel::snapshot_deps_locked(const TaskEntry& e) {
    ResolvedDeps resolved;
    for (TaskId dep : e.record.depends_on) {
        const TaskEntry& parent = *tasks_[dep.value];
        resolved.results.emplace(dep, *parent.record.result_slot);
        resolved.output_files.emplace(dep, parent.output_outcomes);
    }
    return resolved;
}

// Runs on a staging thread: substitute futures, stage inputs, render the
// command, then hand the attempt to the executor. Failures become a
// completion event for this attempt.
void Kernel::prepare_and_execute(TaskId id, std::uint64_t attempt, ResolvedDeps resolved) {
    TaskPayload payload;
    payload.id = id;
    payload.attempt = attempt;
    std::shared_ptr<Executor> executor;
    try {
        AppSpec app;
        {
            std::lock_guard lk(graph_mu_);
            TaskEntry& e = *tasks_[id.value];
            if (e.record.state != TaskState::running || e.attempt != attempt)
                return;  // attempt was overtaken (cancelled) meanwhile
            app = e.record.app;
            payload.args = e.record.args;
            payload.kwargs = e.record.kwargs;
            payload.outputs = e.record.outputs;
            executor = executors_by_label_.at(e.record.executor_label);
        }

        payload.kind = app.kind;
        payload.app_name = app.name;
        if (app.kind == AppSpec::Kind::native && !AppRegistry::instance().find(app.name))
            payload.local_callable = app.callable;

        payload.args = substitute_futures(payload.args, resolved);
        payload.kwargs = substitute_futures(payload.kwargs, resolved);

        StagingContext ctx{config_.run_dir, id, attempt > 0};
        ArgList staged_args;
        staged_args.reserve(payload.args.size());
        for (const auto& a : payload.args) staged_args.push_back(stage_tree(a, ctx));
        payload.args = std::move(staged_args);
        ArgMap staged_kwargs;
        for (const auto& [k, v] : payload.kwargs) staged_kwargs.emplace(k, stage_tree(v, ctx));
        payload.kwargs = std::move(staged_kwargs);

        if (auto it = payload.kwargs.find("inputs"); it != payload.kwargs.end()) {
            if (!it->second.is<ArgList>()) throw Error("'inputs' must be a list of files");
            for (const auto& item : it->second.as<ArgList>()) {
                if (!item.is<FileRef>()) throw Error("'inputs' entries must be files");
                payload.inputs.push_back(item.as<FileRef>());
            }
        }

        if (app.kind == AppSpec::Kind::shell) {
            payload.stdout_path = config_.run_dir / "tasks" /
                                  ("task_" + std::to_string(id.value) + ".stdout");
            payload.stderr_path = config_.run_dir / "tasks" /
                                  ("task_" + std::to_string(id.value) + ".stderr");
            payload.command = render_command(app.command_template, payload.args, payload.kwargs,
                                             payload.inputs, payload.outputs);
        }
    } catch (const StagingError& ex) {
        post_event([this, id, attempt, msg = std::string(ex.what())] {
            process_completion(id, attempt, Outcome::error(ErrorKind::staging_error, msg));
        });
        return;
    } catch (const std::exception& ex) {
        post_event([this, id, attempt, msg = std::string(ex.what())] {
            process_completion(id, attempt, Outcome::error(ErrorKind::app_error, msg));
        });
        return;
    }
    executor->execute(std::move(payload));
}

void Kernel::process_completion(TaskId id, std::uint64_t attempt, Outcome outcome) {
    std::lock_guard lk(graph_mu_);
    TaskEntry& e = *tasks_[id.value];

    // Exactly-once per attempt is the executor's contract; violations are
    // programming errors.
    if (e.record.state != TaskState::running || e.attempt != attempt)
        throw std::logic_error("duplicate or stale completion for task " +
                               std::to_string(id.value) + " attempt " +
                               std::to_string(attempt));

    if (outcome.ok()) {
        // Register declared outputs; a missing file turns that output's
        // DataFuture (not the app future) into a missing_output error.
        e.output_outcomes.clear();
        for (const auto& f : e.record.outputs) {
            try {
                e.output_outcomes.push_back(Outcome::value(ArgValue(stage_out(f))));
            } catch (const MissingOutputError& ex) {
                ErrorInfo err;
                err.kind = ErrorKind::missing_output;
                err.message = ex.what();
                err.file = f;
                e.output_outcomes.push_back(Outcome::error(std::move(err)));
            }
        }
        transition_locked(e, TaskState::done);
        finish_locked(e, TaskState::done, std::move(outcome));
        return;
    }

    bool may_retry = phase_ == Phase::running && e.record.retries_left > 0 &&
                     retryable(outcome.get_error());
    if (may_retry) {
        e.record.retries_left -= 1;
        e.attempt += 1;
        transition_locked(e, TaskState::retry_wait);
        std::uint64_t next_attempt = e.attempt;
        if (config_.retry_delay_s > 0) {
            auto delay = std::chrono::duration<double>(config_.retry_delay_s);
            post_staging([this, id, next_attempt, delay] {
                std::this_thread::sleep_for(delay);
                post_event([this, id, next_attempt] { process_retry_now(id, next_attempt); });
            });
        } else {
            retry_now_locked(e, next_attempt);
        }
        return;
    }

    transition_locked(e, TaskState::failed);
    finish_locked(e, TaskState::failed, std::move(outcome));
}

void Kernel::process_retry_now(TaskId id, std::uint64_t expected_attempt) {
    std::lock_guard lk(graph_mu_);
    retry_now_locked(*tasks_[id.value], expected_attempt);
}

void Kernel::retry_now_locked(TaskEntry& e, std::uint64_t expected_attempt) {
    if (e.record.state != TaskState::retry_wait || e.attempt != expected_attempt)
        return;  // cancelled while waiting
    transition_locked(e, TaskState::launchable);
    launch_locked(e);
}

std::vector<Outcome> Kernel::wait_all(std::span<const AppFuture> futures,
                                      std::optional<std::chrono::milliseconds> timeout) {
    std::optional<std::chrono::steady_clock::time_point> deadline;
    if (timeout) deadline = std::chrono::steady_clock::now() + *timeout;

    std::vector<Outcome> outcomes;
    outcomes.reserve(futures.size());
    for (std::size_t i = 0; i < futures.size(); ++i) {
        if (!deadline) {
            outcomes.push_back(futures[i].outcome());
            continue;
        }
        auto left = *deadline - std::chrono::steady_clock::now();
        auto o = left.count() > 0 ? futures[i].slot()->wait_for(left) : std::nullopt;
        if (!o) {
            std::vector<TaskId> unfinished;
            for (std::size_t j = i; j < futures.size(); ++j)
                if (!futures[j].done()) unfinished.push_back(futures[j].task());
            std::ostringstream os;
            os << "wait_all timed out; unfinished task(s):";
            for (TaskId t : unfinished) os << ' ' << t.value;
            throw WaitTimeoutError(os.str(), std::move(unfinished));
        }
        outcomes.push_back(std::move(*o));
    }
    return outcomes;
}

void Kernel::update_strategy(const StrategyParams& s) {
    for (auto& ex : executors_)
        if (auto* pool = dynamic_cast<WorkerPoolExecutor*>(ex.get())) pool->update_strategy(s);
}

void Kernel::shutdown(ShutdownMode mode) {
    {
        std::unique_lock lk(graph_mu_);
        if (phase_ == Phase::stopped) return;
        if (phase_ == Phase::running)
            phase_ = mode == ShutdownMode::drain ? Phase::draining : Phase::cancelling;

        if (mode == ShutdownMode::cancel) {
            phase_ = Phase::cancelling;
            for (auto& t : tasks_) {
                TaskEntry& e = *t;
                if (e.record.state == TaskState::pending ||
                    e.record.state == TaskState::retry_wait) {
                    transition_locked(e, TaskState::failed);
                    finish_locked(e, TaskState::failed,
                                  Outcome::error(ErrorKind::cancelled, "kernel shutdown"));
                }
            }
        }
    }

    if (mode == ShutdownMode::cancel)
        for (auto& ex : executors_) ex->shutdown(ShutdownMode::cancel);

    {
        std::unique_lock lk(graph_mu_);
        all_terminal_cv_.wait(lk, [&] { return non_terminal_ == 0; });
    }

    if (mode == ShutdownMode::drain)
        for (auto& ex : executors_) ex->shutdown(ShutdownMode::drain);

    {
        std::lock_guard lk(staging_mu_);
        staging_stop_ = true;
    }
    staging_cv_.notify_all();
    for (auto& t : staging_threads_)
        if (t.joinable()) t.join();
    staging_threads_.clear();

    {
        std::lock_guard lk(events_mu_);
        events_stop_ = true;
    }
    events_cv_.notify_all();
    if (event_thread_.joinable()) event_thread_.join();

    {
        std::lock_guard lk(graph_mu_);
        phase_ = Phase::stopped;
    }
    std::lock_guard lk(log_mu_);
    log_.flush();
    log_.close();
}

void Kernel::post_event(std::function<void()> fn) {
    {
        std::lock_guard lk(events_mu_);
        if (events_stop_) return;
        events_.push_back(std::move(fn));
    }
    events_cv_.notify_one();
}

void Kernel::post_staging(std::function<void()> fn) {
    {
        std::lock_guard lk(staging_mu_);
        if (staging_stop_) return;
        staging_jobs_.push_back(std::move(fn));
    }
    staging_cv_.notify_one();
}

void Kernel::event_loop() {
    while (true) {
        std::function<void()> fn;
        {
            std::unique_lock lk(events_mu_);
            events_cv_.wait(lk, [&] { return events_stop_ || !events_.empty(); });
            if (events_.empty()) return;
            fn = std::move(events_.front());
            events_.pop_front();
        }
        fn();
    }
}

void Kernel::staging_loop() {
    while (true) {
        std::function<void()> fn;
        {
            std::unique_lock lk(staging_mu_);
            staging_cv_.wait(lk, [&] { return staging_stop_ || !staging_jobs_.empty(); });
            if (staging_jobs_.empty()) return;
            fn = std::move(staging_jobs_.front());
            staging_jobs_.pop_front();
        }
        fn();
    }
}

Kernel::TaskEntry& Kernel::entry_locked(TaskId id) {
    if (id.value >= tasks_.size()) throw Error("unknown task " + std::to_string(id.value));
    return *tasks_[id.value];
}

const Kernel::TaskEntry& Kernel::entry_locked(TaskId id) const {
    if (id.value >= tasks_.size()) throw Error("unknown task " + std::to_string(id.value));
    return *tasks_[id.value];
}

std::size_t Kernel::task_count() const {
    std::lock_guard lk(graph_mu_);
    return tasks_.size();
}

std::size_t Kernel::non_terminal_count() const {
    std::lock_guard lk(graph_mu_);
    return non_terminal_;
}

TaskState Kernel::task_state(TaskId id) const {
    std::lock_guard lk(graph_mu_);
    return entry_locked(id).record.state;
}

int Kernel::attempts_made(TaskId id) const {
    std::lock_guard lk(graph_mu_);
    return entry_locked(id).attempts_made;
}

Kernel::TaskTimes Kernel::task_times(TaskId id) const {
    std::lock_guard lk(graph_mu_);
    const TaskEntry& e = entry_locked(id);
    return {e.submitted, e.terminal};
}

std::unique_ptr<Kernel> make_kernel(const ConfigDocument& doc) {
    KernelConfig cfg;
    cfg.retries = doc.retries;
    cfg.retry_delay_s = doc.retry_delay_s;
    cfg.run_dir = doc.run_dir;
    cfg.strategy = doc.strategy;
    std::vector<std::shared_ptr<Executor>> executors;
    executors.reserve(doc.executors.size());
    for (const auto& spec : doc.executors)
        executors.push_back(make_executor(spec, std::filesystem::absolute(doc.run_dir),
                                          doc.strategy));
    return std::make_unique<Kernel>(std::move(cfg), std::move(executors));
}

}  // namespace dflow
