#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace dflow {

enum class FileScheme { local, http, https };

const char* to_string(FileScheme s);

/// Location-abstracted file handle exchanged between apps. A FileRef names
/// where the bytes come from (`source`, either a local path or an http(s)
/// URL) separately from where an executing task reads them (`filepath()`,
/// defined only after staging).
class FileRef {
  public:
    FileRef() = default;

    /// Builds a ref from a path or URL. Relative local paths are resolved
    /// against `base` (the kernel's run_dir by convention) at construction
    /// time; an empty `base` leaves them relative to the working directory.
    explicit FileRef(std::string_view source, const std::filesystem::path& base = {});

    FileScheme scheme() const { return scheme_; }
    const std::string& source() const { return source_; }

    /// Final path component of the source, preserved by staging.
    const std::string& basename() const { return basename_; }

    bool is_staged() const { return !staged_path_.empty(); }

    /// Local path of the staged bytes. Throws NotStagedError before staging.
    const std::filesystem::path& filepath() const;

    void set_staged_path(std::filesystem::path p) { staged_path_ = std::move(p); }

    bool operator==(const FileRef&) const = default;

  private:
    FileScheme scheme_ = FileScheme::local;
    std::string source_;
    std::string basename_;
    std::filesystem::path staged_path_;
};

}  // namespace dflow
