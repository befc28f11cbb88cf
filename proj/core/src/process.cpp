#include "dflow/process.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "dflow/errors.hpp"

extern char** environ;

namespace dflow {

namespace {

int decode_status(int status) {
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return -WTERMSIG(status);
    return -1;
}

class SpawnAttrs {
  public:
    SpawnAttrs() {
        posix_spawn_file_actions_init(&actions);
        posix_spawnattr_init(&attr);
    }
    ~SpawnAttrs() {
        posix_spawn_file_actions_destroy(&actions);
        posix_spawnattr_destroy(&attr);
    }
    posix_spawn_file_actions_t actions;
    posix_spawnattr_t attr;
};

pid_t do_spawn(const std::vector<std::string>& argv,
               const std::map<std::string, std::string>& env_extra,
               const std::filesystem::path& stdout_file, const std::filesystem::path& stderr_file,
               int stdout_pipe_fd = -1) {
    if (argv.empty()) throw Error("spawn: empty argv");

    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);

    // Child environment = ours plus the extras.
    std::vector<std::string> env_store;
    std::vector<char*> cenv;
    for (char** e = environ; *e; ++e) {
        std::string_view entry(*e);
        auto eq = entry.find('=');
        std::string key(entry.substr(0, eq));
        if (env_extra.count(key)) continue;
        cenv.push_back(*e);
    }
    for (const auto& [k, v] : env_extra) {
        env_store.push_back(k + "=" + v);
    }
    for (auto& s : env_store) cenv.push_back(s.data());
    cenv.push_back(nullptr);

    SpawnAttrs sa;
    if (!stdout_file.empty())
        posix_spawn_file_actions_addopen(&sa.actions, STDOUT_FILENO, stdout_file.c_str(),
                                         O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (!stderr_file.empty())
        posix_spawn_file_actions_addopen(&sa.actions, STDERR_FILENO, stderr_file.c_str(),
                                         O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (stdout_pipe_fd >= 0) {
        posix_spawn_file_actions_adddup2(&sa.actions, stdout_pipe_fd, STDOUT_FILENO);
        posix_spawn_file_actions_adddup2(&sa.actions, stdout_pipe_fd, STDERR_FILENO);
        posix_spawn_file_actions_addclose(&sa.actions, stdout_pipe_fd);
    }

    pid_t pid = -1;
    int rc = posix_spawn(&pid, argv[0].c_str(), &sa.actions, &sa.attr, cargv.data(), cenv.data());
    if (rc != 0) throw Error("spawn " + argv[0] + ": " + std::strerror(rc));
    return pid;
}

}  // namespace

bool ChildProcess::alive() {
    if (!valid() || reaped_) return false;
    int exit_code;
    return !try_wait(&exit_code);
}

bool ChildProcess::try_wait(int* exit_code) {
    if (!valid()) return false;
    if (reaped_) {
        if (exit_code) *exit_code = status_;
        return true;
    }
    int status = 0;
    pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
        reaped_ = true;
        status_ = decode_status(status);
        if (exit_code) *exit_code = status_;
        return true;
    }
    if (r < 0 && errno == ECHILD) {
        // Someone else reaped it (or it never was our child): treat as gone.
        reaped_ = true;
        status_ = -1;
        if (exit_code) *exit_code = status_;
        return true;
    }
    return false;
}

int ChildProcess::wait() {
    if (!valid()) return -1;
    if (reaped_) return status_;
    int status = 0;
    pid_t r = ::waitpid(pid_, &status, 0);
    reaped_ = true;
    status_ = (r == pid_) ? decode_status(status) : -1;
    return status_;
}

bool ChildProcess::wait_for(std::chrono::milliseconds timeout, int* exit_code) {
    auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
        if (try_wait(exit_code)) return true;
        if (std::chrono::steady_clock::now() >= deadline) return false;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
}

void ChildProcess::send_signal(int sig) {
    if (valid() && !reaped_) ::kill(pid_, sig);
}

void ChildProcess::terminate() { send_signal(SIGTERM); }
void ChildProcess::kill() { send_signal(SIGKILL); }

ChildProcess spawn_process(const SpawnOptions& opts) {
    return ChildProcess(
        do_spawn(opts.argv, opts.env_extra, opts.stdout_file, opts.stderr_file));
}

int run_shell(const std::string& command, const std::filesystem::path& stdout_file,
              const std::filesystem::path& stderr_file) {
    ChildProcess child(
        do_spawn({"/bin/sh", "-c", command}, {}, stdout_file, stderr_file));
    return child.wait();
}

CommandResult run_capture(const std::vector<std::string>& argv,
                          const std::map<std::string, std::string>& env_extra) {
    int fds[2];
    if (::pipe(fds) != 0) throw Error("pipe: " + std::string(std::strerror(errno)));
    pid_t pid;
    try {
        pid = do_spawn(argv, env_extra, {}, {}, fds[1]);
    } catch (...) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw;
    }
    ::close(fds[1]);
    CommandResult result;
    char buf[4096];
    ssize_t n;
    while ((n = ::read(fds[0], buf, sizeof buf)) > 0) result.output.append(buf, std::size_t(n));
    ::close(fds[0]);
    ChildProcess child(pid);
    result.exit_code = child.wait();
    return result;
}

}  // namespace dflow
