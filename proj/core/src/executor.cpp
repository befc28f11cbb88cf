#include "dflow/executor.hpp"

#include "dflow/errors.hpp"
#include "dflow/in_process_executor.hpp"
#include "dflow/worker_pool_executor.hpp"

namespace dflow {

namespace {

ArgValue files_to_value(const std::vector<FileRef>& files) {
    ArgList out;
    out.reserve(files.size());
    for (const auto& f : files) out.emplace_back(f);
    return ArgValue(std::move(out));
}

std::vector<FileRef> files_from_value(const ArgValue& v) {
    std::vector<FileRef> out;
    for (const auto& item : v.as<ArgList>()) out.push_back(item.as<FileRef>());
    return out;
}

}  // namespace

ArgValue payload_to_value(const TaskPayload& p) {
    ArgMap m;
    m.emplace("id", ArgValue(static_cast<std::int64_t>(p.id.value)));
    m.emplace("attempt", ArgValue(static_cast<std::int64_t>(p.attempt)));
    m.emplace("kind", ArgValue(std::string(p.kind == AppSpec::Kind::native ? "native" : "shell")));
    m.emplace("app", ArgValue(p.app_name));
    m.emplace("command", ArgValue(p.command));
    m.emplace("args", ArgValue(p.args));
    m.emplace("kwargs", ArgValue(p.kwargs));
    m.emplace("inputs", files_to_value(p.inputs));
    m.emplace("outputs", files_to_value(p.outputs));
    m.emplace("stdout", ArgValue(p.stdout_path.string()));
    m.emplace("stderr", ArgValue(p.stderr_path.string()));
    return ArgValue(std::move(m));
}

TaskPayload payload_from_value(const ArgValue& v) {
    const auto& m = v.as<ArgMap>();
    TaskPayload p;
    p.id = TaskId(static_cast<std::uint64_t>(m.at("id").as_int()));
    p.attempt = static_cast<std::uint64_t>(m.at("attempt").as_int());
    p.kind = m.at("kind").as_text() == "shell" ? AppSpec::Kind::shell : AppSpec::Kind::native;
    p.app_name = m.at("app").as_text();
    p.command = m.at("command").as_text();
    p.args = m.at("args").as<ArgList>();
    p.kwargs = m.at("kwargs").as<ArgMap>();
    p.inputs = files_from_value(m.at("inputs"));
    p.outputs = files_from_value(m.at("outputs"));
    p.stdout_path = m.at("stdout").as_text();
    p.stderr_path = m.at("stderr").as_text();
    return p;
}

std::shared_ptr<Executor> make_executor(const ExecutorSpec& spec,
                                        const std::filesystem::path& run_dir,
                                        const StrategyParams& strategy) {
    switch (spec.kind) {
        case ExecutorSpec::Kind::in_process:
            return std::make_shared<InProcessExecutor>(spec.label, spec.max_workers);
        case ExecutorSpec::Kind::worker_pool:
            return std::make_shared<WorkerPoolExecutor>(spec, run_dir, strategy);
    }
    throw Error("unknown executor kind");
}

}  // namespace dflow
