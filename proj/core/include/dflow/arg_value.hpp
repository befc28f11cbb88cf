#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dflow/file_ref.hpp"
#include "dflow/types.hpp"

namespace dflow {

class ArgValue;

using ArgList = std::vector<ArgValue>;
using ArgMap = std::map<std::string, ArgValue>;

/// Placeholder for the result of a not-yet-completed task.
struct FutureRef {
    TaskId task;
    bool operator==(const FutureRef&) const = default;
};

/// Placeholder for one declared output file of a task.
struct DataFutureRef {
    TaskId task;
    std::size_t output_index = 0;
    bool operator==(const DataFutureRef&) const = default;
};

/// Raw byte-string scalar.
struct Bytes {
    std::vector<std::uint8_t> data;
    bool operator==(const Bytes&) const = default;
};

/// Opaque serialized object. Round-trips byte-faithfully; dependency
/// scanning does not look inside.
struct Blob {
    std::vector<std::uint8_t> data;
    bool operator==(const Blob&) const = default;
};

/// Tagged union of everything that may appear in a task's argument list:
/// null, scalars, byte payloads, files, future placeholders, and
/// recursively nested lists and maps.
class ArgValue {
  public:
    using Storage = std::variant<std::monostate, std::int64_t, double, bool, std::string, Bytes,
                                 Blob, FileRef, FutureRef, DataFutureRef, ArgList, ArgMap>;

    ArgValue() = default;  // null
    ArgValue(std::int64_t v) : v_(v) {}
    ArgValue(int v) : v_(static_cast<std::int64_t>(v)) {}
    ArgValue(double v) : v_(v) {}
    ArgValue(bool v) : v_(v) {}
    ArgValue(std::string v) : v_(std::move(v)) {}
    ArgValue(const char* v) : v_(std::string(v)) {}
    ArgValue(Bytes v) : v_(std::move(v)) {}
    ArgValue(Blob v) : v_(std::move(v)) {}
    ArgValue(FileRef v) : v_(std::move(v)) {}
    ArgValue(FutureRef v) : v_(v) {}
    ArgValue(DataFutureRef v) : v_(v) {}
    ArgValue(ArgList v) : v_(std::move(v)) {}
    ArgValue(ArgMap v) : v_(std::move(v)) {}

    bool is_null() const { return std::holds_alternative<std::monostate>(v_); }

    template <typename T>
    bool is() const {
        return std::holds_alternative<T>(v_);
    }

    template <typename T>
    const T& as() const {
        return std::get<T>(v_);
    }

    template <typename T>
    T& as() {
        return std::get<T>(v_);
    }

    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    double as_real() const { return std::get<double>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    const std::string& as_text() const { return std::get<std::string>(v_); }

    const Storage& storage() const { return v_; }

    bool operator==(const ArgValue&) const = default;

    /// Debug rendering, also used by the CLI to print results.
    std::string to_display_string() const;

  private:
    Storage v_;
};

/// Collects the TaskIds of every FutureRef and DataFutureRef at any nesting
/// depth inside lists and maps. Scalars, blobs and FileRefs contribute
/// nothing; duplicates collapse (set semantics). Total: never fails.
std::set<TaskId> scan_dependencies(const ArgList& args, const ArgMap& kwargs);

std::set<TaskId> scan_value(const ArgValue& v);

}  // namespace dflow
