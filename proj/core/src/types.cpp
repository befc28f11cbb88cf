#include "dflow/types.hpp"

namespace dflow {

const char* to_string(TaskState s) {
    switch (s) {
        case TaskState::pending: return "pending";
        case TaskState::launchable: return "launchable";
        case TaskState::running: return "running";
        case TaskState::retry_wait: return "retry_wait";
        case TaskState::done: return "done";
        case TaskState::failed: return "failed";
        case TaskState::dep_failed: return "dep_failed";
    }
    return "?";
}

bool legal_transition(TaskState from, TaskState to) {
    switch (from) {
        case TaskState::pending:
            return to == TaskState::launchable || to == TaskState::dep_failed ||
                   to == TaskState::failed;  // failed only via shutdown(cancel)
        case TaskState::launchable:
            return to == TaskState::running || to == TaskState::failed;
        case TaskState::running:
            return to == TaskState::done || to == TaskState::retry_wait ||
                   to == TaskState::failed;
        case TaskState::retry_wait:
            return to == TaskState::launchable || to == TaskState::failed;
        case TaskState::done:
        case TaskState::failed:
        case TaskState::dep_failed:
            return false;  // terminal
    }
    return false;
}

}  // namespace dflow
