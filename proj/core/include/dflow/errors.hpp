#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dflow/types.hpp"

namespace dflow {

/// Base of all exceptions thrown by the library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Accessing FileRef::filepath() before the file has been staged.
class NotStagedError : public Error {
  public:
    using Error::Error;
};

/// Input staging failed (missing local file, HTTP error, timeout, ...).
class StagingError : public Error {
  public:
    using Error::Error;
};

/// A declared output file was not found at its declared location.
class MissingOutputError : public Error {
  public:
    using Error::Error;
};

/// Shell command template with unbalanced braces or a malformed placeholder.
class TemplateError : public Error {
  public:
    using Error::Error;
};

/// render_command met a placeholder it cannot bind, or an out-of-range
/// inputs/outputs index.
class RenderError : public Error {
  public:
    using Error::Error;
};

/// substitute_futures was handed args whose dependencies are not all present
/// in the resolved map.
class UnresolvedDependencyError : public Error {
  public:
    UnresolvedDependencyError(const std::string& msg, TaskId missing)
        : Error(msg), missing_task(missing) {}
    TaskId missing_task;
};

/// substitute_futures met a dependency whose outcome is an error.
class DependencyFailureError : public Error {
  public:
    DependencyFailureError(const std::string& msg, std::vector<TaskId> failed)
        : Error(msg), failed_tasks(std::move(failed)) {}
    std::vector<TaskId> failed_tasks;
};

/// Submission attempted after kernel shutdown began.
class ShutdownError : public Error {
  public:
    using Error::Error;
};

/// wait_all hit its deadline; carries the not-yet-terminal task ids.
class WaitTimeoutError : public Error {
  public:
    WaitTimeoutError(const std::string& msg, std::vector<TaskId> unfinished)
        : Error(msg), unfinished_tasks(std::move(unfinished)) {}
    std::vector<TaskId> unfinished_tasks;
};

/// Configuration file failed to parse or validate.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Provider cannot grant another block (max_blocks reached) or was asked
/// about a block it does not know.
class ProviderError : public Error {
  public:
    using Error::Error;
};

/// Malformed frame or value encoding on the worker wire.
class WireError : public Error {
  public:
    using Error::Error;
};

}  // namespace dflow
