#pragma once

#include <sys/types.h>

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dflow {

struct SpawnOptions {
    std::vector<std::string> argv;  // argv[0] = executable path
    std::map<std::string, std::string> env_extra;
    std::filesystem::path stdout_file;  // empty: inherit
    std::filesystem::path stderr_file;  // empty: inherit
};

/// Handle to a spawned child. Non-owning of the process lifetime beyond
/// reaping: call wait()/try_wait() eventually to avoid zombies.
class ChildProcess {
  public:
    ChildProcess() = default;
    explicit ChildProcess(pid_t pid) : pid_(pid) {}

    pid_t pid() const { return pid_; }
    bool valid() const { return pid_ > 0; }

    /// True while the child has not been reaped and is still running.
    bool alive();

    /// Blocks until exit; returns the exit code (or -signal for a killed
    /// child). Idempotent: later calls return the recorded status.
    int wait();

    /// Non-blocking reap; true if the child has exited.
    bool try_wait(int* exit_code = nullptr);

    /// Polls try_wait() until exit or deadline.
    bool wait_for(std::chrono::milliseconds timeout, int* exit_code = nullptr);

    void send_signal(int sig);
    void terminate();  // SIGTERM
    void kill();       // SIGKILL

  private:
    pid_t pid_ = -1;
    bool reaped_ = false;
    int status_ = 0;
};

/// Fork/exec without a shell. Throws dflow::Error on spawn failure.
ChildProcess spawn_process(const SpawnOptions& opts);

/// Runs `command` under /bin/sh -c with stdout/stderr redirected to the
/// given files (created, truncated). Blocks; returns the exit code, or
/// -signal if the shell was killed.
int run_shell(const std::string& command, const std::filesystem::path& stdout_file,
              const std::filesystem::path& stderr_file);

struct CommandResult {
    int exit_code = 0;
    std::string output;  // combined stdout+stderr
};

/// Runs argv to completion, capturing output. Used by channels.
CommandResult run_capture(const std::vector<std::string>& argv,
                          const std::map<std::string, std::string>& env_extra = {});

}  // namespace dflow
