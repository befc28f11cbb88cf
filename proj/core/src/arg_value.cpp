#include "dflow/arg_value.hpp"

#include <sstream>

namespace dflow {

namespace {

void scan_into(const ArgValue& v, std::set<TaskId>& out) {
    const auto& st = v.storage();
    if (const auto* f = std::get_if<FutureRef>(&st)) {
        out.insert(f->task);
    } else if (const auto* d = std::get_if<DataFutureRef>(&st)) {
        out.insert(d->task);
    } else if (const auto* list = std::get_if<ArgList>(&st)) {
        for (const auto& item : *list) scan_into(item, out);
    } else if (const auto* map = std::get_if<ArgMap>(&st)) {
        for (const auto& [_, item] : *map) scan_into(item, out);
    }
    // Scalars, Bytes, Blob and FileRef carry no graph edges. Blobs are
    // treated as already-materialized values: no recursion inside.
}

}  // namespace

std::set<TaskId> scan_value(const ArgValue& v) {
    std::set<TaskId> out;
    scan_into(v, out);
    return out;
}

std::set<TaskId> scan_dependencies(const ArgList& args, const ArgMap& kwargs) {
    std::set<TaskId> out;
    for (const auto& a : args) scan_into(a, out);
    for (const auto& [_, v] : kwargs) scan_into(v, out);
    return out;
}

std::string ArgValue::to_display_string() const {
    std::ostringstream os;
    struct Printer {
        std::ostream& os;
        void operator()(std::monostate) { os << "null"; }
        void operator()(std::int64_t v) { os << v; }
        void operator()(double v) { os << v; }
        void operator()(bool v) { os << (v ? "true" : "false"); }
        void operator()(const std::string& v) { os << v; }
        void operator()(const Bytes& v) { os << "<bytes:" << v.data.size() << ">"; }
        void operator()(const Blob& v) { os << "<blob:" << v.data.size() << ">"; }
        void operator()(const FileRef& v) {
            os << "file(" << (v.is_staged() ? v.filepath().string() : v.source()) << ")";
        }
        void operator()(const FutureRef& v) { os << "future(" << v.task.value << ")"; }
        void operator()(const DataFutureRef& v) {
            os << "datafuture(" << v.task.value << "," << v.output_index << ")";
        }
        void operator()(const ArgList& v) {
            os << "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) os << ", ";
                os << v[i].to_display_string();
            }
            os << "]";
        }
        void operator()(const ArgMap& v) {
            os << "{";
            bool first = true;
            for (const auto& [k, item] : v) {
                if (!first) os << ", ";
                first = false;
                os << k << ": " << item.to_display_string();
            }
            os << "}";
        }
    };
    std::visit(Printer{os}, v_);
    return os.str();
}

}  // namespace dflow
