#pragma once

#include <optional>
#include <set>
#include <vector>

#include "dflow/app.hpp"
#include "dflow/future.hpp"
#include "dflow/outcome.hpp"
#include "dflow/types.hpp"

namespace dflow {

/// What a caller hands to Kernel::submit. The kernel turns this into a
/// registered TaskRecord.
struct TaskSubmission {
    AppSpec app;
    ArgList args;
    ArgMap kwargs;
    std::vector<FileRef> outputs;
};

/// One node of the dependency graph. State, result_slot and retries_left are
/// mutated only by the kernel's event context; everything else is fixed at
/// registration.
struct TaskRecord {
    TaskId id;
    AppSpec app;
    ArgList args;
    ArgMap kwargs;
    std::vector<FileRef> outputs;

    /// Exactly the TaskIds scan_dependencies finds in args + kwargs.
    std::set<TaskId> depends_on;

    TaskState state = TaskState::pending;
    int retries_left = 0;
    std::string executor_label;

    /// Written exactly once, at the terminal transition.
    std::optional<Outcome> result_slot;
};

}  // namespace dflow
