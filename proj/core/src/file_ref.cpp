#include "dflow/file_ref.hpp"

#include "dflow/errors.hpp"

namespace dflow {

namespace {

bool has_prefix(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

// Last path component of a path or URL, with any query string dropped.
std::string derive_basename(FileScheme scheme, std::string_view source) {
    std::string_view s = source;
    if (scheme != FileScheme::local) {
        if (auto q = s.find('?'); q != std::string_view::npos) s = s.substr(0, q);
        if (auto f = s.find('#'); f != std::string_view::npos) s = s.substr(0, f);
    }
    auto slash = s.find_last_of('/');
    if (slash != std::string_view::npos) s = s.substr(slash + 1);
    return std::string(s);
}

}  // namespace

const char* to_string(FileScheme s) {
    switch (s) {
        case FileScheme::local: return "local";
        case FileScheme::http: return "http";
        case FileScheme::https: return "https";
    }
    return "?";
}

FileRef::FileRef(std::string_view source, const std::filesystem::path& base) {
    if (has_prefix(source, "http://")) {
        scheme_ = FileScheme::http;
        source_ = std::string(source);
    } else if (has_prefix(source, "https://")) {
        scheme_ = FileScheme::https;
        source_ = std::string(source);
    } else if (has_prefix(source, "file://")) {
        scheme_ = FileScheme::local;
        source_ = std::string(source.substr(7));
    } else {
        scheme_ = FileScheme::local;
        source_ = std::string(source);
    }
    if (scheme_ == FileScheme::local && !base.empty()) {
        std::filesystem::path p(source_);
        if (p.is_relative()) source_ = (base / p).lexically_normal().string();
    }
    basename_ = derive_basename(scheme_, source_);
}

const std::filesystem::path& FileRef::filepath() const {
    if (!is_staged())
        throw NotStagedError("filepath() on unstaged file: " + source_);
    return staged_path_;
}

}  // namespace dflow
