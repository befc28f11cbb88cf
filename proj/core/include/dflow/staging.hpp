#pragma once

#include <filesystem>

#include "dflow/file_ref.hpp"
#include "dflow/types.hpp"

namespace dflow {

struct StagingContext {
    std::filesystem::path run_dir;
    TaskId task;
    /// Retry attempts re-stage from scratch: an already-fetched copy is
    /// discarded and fetched again.
    bool refetch = false;
};

/// Materializes an input before execution. local scheme: existence check,
/// staged path is the source itself (same filesystem, no copy). http/https:
/// fetched to <run_dir>/staging/<task_id>/<basename>. Staging the same ref
/// twice for one task reuses the fetched copy unless `refetch` is set.
/// Throws StagingError with the cause (404, timeout, unreadable path).
FileRef stage_in(FileRef file, const StagingContext& ctx);

/// Registers a declared output after execution: verifies the file exists at
/// its declared location and fills the staged path. Throws
/// MissingOutputError if absent.
FileRef stage_out(FileRef file);

/// The staged local path of `file`; throws NotStagedError if unstaged.
/// (Equivalent to file.filepath(); kept as a free function to mirror the
/// FileRef usage inside apps.)
std::filesystem::path filepath(const FileRef& file);

}  // namespace dflow
