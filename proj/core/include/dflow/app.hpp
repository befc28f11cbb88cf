#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dflow/arg_value.hpp"
#include "dflow/file_ref.hpp"

namespace dflow {

/// Everything a native callable receives. Callables must be self-contained:
/// all context arrives through this structure, never through ambient program
/// state (the worker-pool executor runs them in a different process).
struct AppArgs {
    ArgList args;
    ArgMap kwargs;                 // the reserved "outputs" key is stripped
    std::vector<FileRef> inputs;   // staged input files, from the "inputs" kwarg
    std::vector<FileRef> outputs;  // declared output files
};

using NativeFn = std::function<ArgValue(const AppArgs&)>;

struct AppOptions {
    std::optional<std::string> executor_label;
    std::optional<int> retry_override;
};

/// An app: a wrapped unit of work the runtime may execute concurrently.
/// Either a native host function or a shell command template.
struct AppSpec {
    enum class Kind { native, shell };

    Kind kind = Kind::native;
    std::string name;

    // kind == native. A callable attached here is usable by the in-process
    // executor directly; the worker-pool executor resolves `name` in the
    // worker's AppRegistry instead.
    NativeFn callable;

    // kind == shell: command template with {0}/{name}/{inputs[i]}/{outputs[i]}
    // placeholders.
    std::string command_template;

    std::optional<std::string> executor_label;
    std::optional<int> retry_override;
};

/// Captured result of a shell task. The stdout/stderr files exist on disk
/// after completion (possibly empty), under <run_dir>/tasks/.
struct ShellResult {
    int exit_code = 0;
    FileRef stdout_file;
    FileRef stderr_file;
};

/// Wraps a host function as an app usable for repeated invocations. Also
/// registers it by name so worker processes can resolve it.
AppSpec define_native_app(std::string name, NativeFn fn, AppOptions options = {});

/// Wraps a shell command template as an app. Throws TemplateError on
/// unbalanced braces or a placeholder that is not {N}, {name}, {inputs[i]}
/// or {outputs[i]}. `{{` and `}}` render literal braces.
AppSpec define_shell_app(std::string name, std::string command_template, AppOptions options = {});

/// Substitutes template placeholders from args/kwargs/inputs/outputs.
/// FileRef values render as their staged local filepath. Substitution is
/// purely textual; no shell escaping is added. Throws RenderError on an
/// unbound placeholder or out-of-range index.
std::string render_command(const std::string& command_template, const ArgList& args,
                           const ArgMap& kwargs, std::span<const FileRef> inputs,
                           std::span<const FileRef> outputs);

/// Process-wide name -> native callable table. Both the kernel process and
/// every worker-host process resolve native tasks through it, so an app that
/// should run on the worker-pool executor must be registered under the same
/// name in the worker binary.
class AppRegistry {
  public:
    static AppRegistry& instance();

    void register_native(const std::string& name, NativeFn fn);
    /// nullptr when unknown.
    const NativeFn* find(const std::string& name) const;
    std::vector<std::string> names() const;

  private:
    AppRegistry() = default;
    mutable std::mutex m_;
    std::map<std::string, NativeFn> fns_;
};

}  // namespace dflow
