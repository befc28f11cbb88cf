#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "dflow/errors.hpp"
#include "dflow/outcome.hpp"

namespace dflow {

/// Thrown by AppFuture::result() / DataFuture::result() when the task
/// resolved to an error.
class TaskError : public Error {
  public:
    TaskError(const std::string& msg, ErrorInfo info) : Error(msg), error(std::move(info)) {}
    ErrorInfo error;
};

namespace detail {

/// Write-once waitable slot shared between the kernel (writer) and any
/// number of waiting threads. Once set, the stored outcome never changes.
class OutcomeSlot {
  public:
    /// First write wins; returns false if the slot was already set.
    bool set(Outcome o) {
        {
            std::lock_guard lk(m_);
            if (value_) return false;
            value_ = std::move(o);
        }
        cv_.notify_all();
        return true;
    }

    bool ready() const {
        std::lock_guard lk(m_);
        return value_.has_value();
    }

    Outcome wait() const {
        std::unique_lock lk(m_);
        cv_.wait(lk, [&] { return value_.has_value(); });
        return *value_;
    }

    std::optional<Outcome> wait_for(std::chrono::nanoseconds timeout) const {
        std::unique_lock lk(m_);
        if (!cv_.wait_for(lk, timeout, [&] { return value_.has_value(); })) return std::nullopt;
        return *value_;
    }

  private:
    mutable std::mutex m_;
    mutable std::condition_variable cv_;
    std::optional<Outcome> value_;
};

}  // namespace detail

/// Future bound to one declared output file of a task. Resolves to the
/// produced FileRef once the producing task completes and the file exists,
/// or to an error (missing_output, or the producer's failure).
class DataFuture {
  public:
    DataFuture() = default;
    DataFuture(TaskId producer, FileRef file)
        : producer_(producer),
          file_(std::move(file)),
          slot_(std::make_shared<detail::OutcomeSlot>()) {}

    TaskId producing_task() const { return producer_; }

    /// The declared file, as passed at invocation (may be unstaged).
    const FileRef& file() const { return file_; }

    bool done() const { return slot_ && slot_->ready(); }

    Outcome outcome() const { return slot_->wait(); }

    /// Blocks until resolution; returns the produced FileRef or throws
    /// TaskError.
    FileRef result() const;

    std::shared_ptr<detail::OutcomeSlot> slot() const { return slot_; }

  private:
    TaskId producer_;
    FileRef file_;
    std::shared_ptr<detail::OutcomeSlot> slot_;
};

/// Handle returned immediately when an app is invoked. done() is monotone
/// and result() is memoized: every call after completion returns the same
/// value without blocking.
class AppFuture {
  public:
    AppFuture() = default;
    AppFuture(TaskId task, std::shared_ptr<detail::OutcomeSlot> slot,
              std::vector<DataFuture> outputs)
        : task_(task), slot_(std::move(slot)), outputs_(std::move(outputs)) {}

    TaskId task() const { return task_; }

    bool valid() const { return slot_ != nullptr; }

    bool done() const { return slot_ && slot_->ready(); }

    /// Blocks until the task is terminal and returns its outcome.
    Outcome outcome() const { return slot_->wait(); }

    /// Bounded wait: returns the outcome, or a timeout-kind error outcome if
    /// the deadline passes first (the task itself is unaffected).
    Outcome outcome_within(std::chrono::nanoseconds timeout) const;

    /// Blocks until the task is terminal; returns the result value or
    /// throws TaskError if the task failed.
    ArgValue result() const;

    /// One DataFuture per declared output file, in declaration order.
    const std::vector<DataFuture>& outputs() const { return outputs_; }

    std::shared_ptr<detail::OutcomeSlot> slot() const { return slot_; }

  private:
    TaskId task_;
    std::shared_ptr<detail::OutcomeSlot> slot_;
    std::vector<DataFuture> outputs_;
};

}  // namespace dflow
