#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dflow/arg_value.hpp"
#include "dflow/types.hpp"

namespace dflow {

enum class ErrorKind {
    app_error,       // native app raised / unknown app name
    exit_code,       // shell command exited nonzero
    dep_failure,     // an upstream task failed; this task never executed
    missing_output,  // declared output file absent after completion
    staging_error,   // input staging failed
    timeout,         // a wait expired
    executor_down,   // worker/executor lost mid-attempt; retryable
    cancelled,       // kernel shutdown(cancel) before execution
};

const char* to_string(ErrorKind k);

struct ErrorInfo {
    ErrorKind kind = ErrorKind::app_error;
    std::string message;
    int exit_code = 0;                   // kind == exit_code
    std::vector<TaskId> failed_tasks;    // kind == dep_failure: deduplicated, ascending
    std::optional<FileRef> file;         // kind == missing_output

    bool operator==(const ErrorInfo&) const = default;
};

/// Terminal result of a task (or of one output file): either a value or a
/// structured error.
class Outcome {
  public:
    Outcome() : v_(ArgValue{}) {}

    static Outcome value(ArgValue v) { return Outcome(std::move(v)); }
    static Outcome error(ErrorInfo e) { return Outcome(std::move(e)); }
    static Outcome error(ErrorKind kind, std::string message) {
        return Outcome(ErrorInfo{.kind = kind, .message = std::move(message)});
    }

    bool ok() const { return std::holds_alternative<ArgValue>(v_); }

    const ArgValue& get_value() const { return std::get<ArgValue>(v_); }
    const ErrorInfo& get_error() const { return std::get<ErrorInfo>(v_); }

    bool operator==(const Outcome&) const = default;

    /// One-line rendering for logs and reports.
    std::string to_display_string() const;

  private:
    explicit Outcome(ArgValue v) : v_(std::move(v)) {}
    explicit Outcome(ErrorInfo e) : v_(std::move(e)) {}

    std::variant<ArgValue, ErrorInfo> v_;
};

/// Snapshot of the resolved state of a task's dependencies, captured by the
/// kernel when the task is promoted to launchable.
struct ResolvedDeps {
    /// Terminal outcome per upstream task.
    std::map<TaskId, Outcome> results;
    /// Per-output-file outcome per upstream task (FileRef value, or a
    /// missing_output error). Only tasks referenced via DataFutureRef need
    /// entries here.
    std::map<TaskId, std::vector<Outcome>> output_files;
};

/// Returns `args` with every FutureRef replaced by the producing task's
/// result value and every DataFutureRef replaced by the produced FileRef;
/// structure and ordering are otherwise identical. Throws
/// UnresolvedDependencyError if a needed task is missing from `resolved`,
/// DependencyFailureError if any referenced outcome is an error.
ArgList substitute_futures(const ArgList& args, const ResolvedDeps& resolved);
ArgMap substitute_futures(const ArgMap& kwargs, const ResolvedDeps& resolved);
ArgValue substitute_value(const ArgValue& v, const ResolvedDeps& resolved);

}  // namespace dflow
