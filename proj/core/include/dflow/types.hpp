#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace dflow {

/// Identity of one node in the dependency graph. Ids are assigned in
/// submission order, starting at 0, and are never reused within a kernel
/// instance; every dependency of a task has a smaller id than the task
/// itself, so id order is a topological order.
struct TaskId {
    std::uint64_t value = 0;

    constexpr TaskId() = default;
    constexpr explicit TaskId(std::uint64_t v) : value(v) {}

    constexpr auto operator<=>(const TaskId&) const = default;
};

using BlockId = std::uint64_t;

enum class TaskState {
    pending,     // registered, waiting on dependencies
    launchable,  // all dependencies resolved, waiting for an executor slot
    running,     // attempt in flight (staging + execution)
    retry_wait,  // last attempt failed, retry budget remains
    done,        // terminal success
    failed,      // terminal failure (budget exhausted or cancelled)
    dep_failed,  // terminal, never executed: an upstream task failed
};

const char* to_string(TaskState s);

/// True iff `from -> to` is a legal task state transition.
bool legal_transition(TaskState from, TaskState to);

inline bool is_terminal(TaskState s) {
    return s == TaskState::done || s == TaskState::failed || s == TaskState::dep_failed;
}

enum class ShutdownMode { drain, cancel };

}  // namespace dflow

template <>
struct std::hash<dflow::TaskId> {
    std::size_t operator()(const dflow::TaskId& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
