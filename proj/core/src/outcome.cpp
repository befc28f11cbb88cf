#include "dflow/outcome.hpp"

#include <sstream>

#include "dflow/errors.hpp"

namespace dflow {

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::app_error: return "app_error";
        case ErrorKind::exit_code: return "exit_code";
        case ErrorKind::dep_failure: return "dep_failure";
        case ErrorKind::missing_output: return "missing_output";
        case ErrorKind::staging_error: return "staging_error";
        case ErrorKind::timeout: return "timeout";
        case ErrorKind::executor_down: return "executor_down";
        case ErrorKind::cancelled: return "cancelled";
    }
    return "?";
}

std::string Outcome::to_display_string() const {
    if (ok()) return get_value().to_display_string();
    const auto& e = get_error();
    std::ostringstream os;
    os << to_string(e.kind);
    if (e.kind == ErrorKind::exit_code) os << "(" << e.exit_code << ")";
    if (e.kind == ErrorKind::dep_failure) {
        os << "([";
        for (std::size_t i = 0; i < e.failed_tasks.size(); ++i) {
            if (i) os << ",";
            os << e.failed_tasks[i].value;
        }
        os << "])";
    }
    if (!e.message.empty()) os << ": " << e.message;
    return os.str();
}

namespace {

struct SubstituteVisitor {
    const ResolvedDeps& resolved;

    const Outcome& result_of(TaskId id) const {
        auto it = resolved.results.find(id);
        if (it == resolved.results.end())
            throw UnresolvedDependencyError(
                "no resolved outcome for task " + std::to_string(id.value), id);
        return it->second;
    }

    ArgValue operator()(const FutureRef& f) const {
        const Outcome& o = result_of(f.task);
        if (!o.ok())
            throw DependencyFailureError(
                "dependency task " + std::to_string(f.task.value) + " failed: " +
                    o.get_error().message,
                {f.task});
        return o.get_value();
    }

    ArgValue operator()(const DataFutureRef& d) const {
        // The producing task must be resolved successfully, and the specific
        // output file must have been produced.
        const Outcome& task_outcome = result_of(d.task);
        if (!task_outcome.ok())
            throw DependencyFailureError(
                "dependency task " + std::to_string(d.task.value) + " failed: " +
                    task_outcome.get_error().message,
                {d.task});
        auto it = resolved.output_files.find(d.task);
        if (it == resolved.output_files.end() || d.output_index >= it->second.size())
            throw UnresolvedDependencyError("no resolved output " +
                                                std::to_string(d.output_index) + " of task " +
                                                std::to_string(d.task.value),
                                            d.task);
        const Outcome& file_outcome = it->second[d.output_index];
        if (!file_outcome.ok())
            throw DependencyFailureError("output " + std::to_string(d.output_index) +
                                             " of task " + std::to_string(d.task.value) +
                                             " was not produced: " +
                                             file_outcome.get_error().message,
                                         {d.task});
        return file_outcome.get_value();
    }

    ArgValue operator()(const ArgList& list) const {
        ArgList out;
        out.reserve(list.size());
        for (const auto& item : list) out.push_back(substitute_value(item, resolved));
        return out;
    }

    ArgValue operator()(const ArgMap& map) const {
        ArgMap out;
        for (const auto& [k, item] : map) out.emplace(k, substitute_value(item, resolved));
        return out;
    }

    template <typename T>
    ArgValue operator()(const T& v) const {
        return ArgValue(v);  // scalars, Bytes, Blob, FileRef pass through
    }

    ArgValue operator()(std::monostate) const { return ArgValue(); }
};

}  // namespace

ArgValue substitute_value(const ArgValue& v, const ResolvedDeps& resolved) {
    return std::visit(SubstituteVisitor{resolved}, v.storage());
}

ArgList substitute_futures(const ArgList& args, const ResolvedDeps& resolved) {
    ArgList out;
    out.reserve(args.size());
    for (const auto& a : args) out.push_back(substitute_value(a, resolved));
    return out;
}

ArgMap substitute_futures(const ArgMap& kwargs, const ResolvedDeps& resolved) {
    ArgMap out;
    for (const auto& [k, v] : kwargs) out.emplace(k, substitute_value(v, resolved));
    return out;
}

}  // namespace dflow
