#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "dflow/staging.hpp"

#include <fstream>
#include <system_error>

#include "dflow/errors.hpp"
#include "httplib.h"

namespace dflow {

namespace {

constexpr int kHttpTimeoutSeconds = 30;
constexpr int kMaxRedirects = 5;

// Splits "http://host:port/path" into (host_port, path).
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

void fetch_http(const FileRef& file, const std::filesystem::path& dest) {
    std::string url = file.source();
    for (int hop = 0; hop <= kMaxRedirects; ++hop) {
        auto [origin, path] = split_url(url);
        httplib::Client client(origin);
        client.set_connection_timeout(kHttpTimeoutSeconds, 0);
        client.set_read_timeout(kHttpTimeoutSeconds, 0);
        client.set_follow_location(false);  // counted manually, capped at 5

        auto res = client.Get(path);
        if (!res)
            throw StagingError("GET " + url + ": " + httplib::to_string(res.error()));
        if (res->status >= 300 && res->status < 400) {
            auto loc = res->get_header_value("Location");
            if (loc.empty())
                throw StagingError("GET " + url + ": redirect without Location");
            url = loc;
            continue;
        }
        if (res->status != 200)
            throw StagingError("GET " + url + ": HTTP " + std::to_string(res->status));
        std::ofstream out(dest, std::ios::binary | std::ios::trunc);
        if (!out) throw StagingError("cannot write " + dest.string());
        out.write(res->body.data(), static_cast<std::streamsize>(res->body.size()));
        if (!out) throw StagingError("short write to " + dest.string());
        return;
    }
    throw StagingError("GET " + file.source() + ": more than " +
                       std::to_string(kMaxRedirects) + " redirects");
}

}  // namespace

FileRef stage_in(FileRef file, const StagingContext& ctx) {
    if (file.scheme() == FileScheme::local) {
        std::filesystem::path src(file.source());
        if (src.is_relative()) src = std::filesystem::absolute(src);
        std::error_code ec;
        if (!std::filesystem::exists(src, ec) || ec)
            throw StagingError("input file not found: " + src.string());
        // Same filesystem: path translation is the identity, no copy.
        file.set_staged_path(src);
        return file;
    }

    std::filesystem::path dir =
        ctx.run_dir / "staging" / std::to_string(ctx.task.value);
    std::filesystem::path dest = dir / file.basename();

    if (!ctx.refetch) {
        // One fetch per task: a copy staged earlier for this task is reused.
        if (file.is_staged() && std::filesystem::exists(file.filepath())) return file;
        if (std::filesystem::exists(dest)) {
            file.set_staged_path(dest);
            return file;
        }
    }

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw StagingError("cannot create " + dir.string() + ": " + ec.message());
    fetch_http(file, dest);
    file.set_staged_path(dest);
    return file;
}

FileRef stage_out(FileRef file) {
    std::filesystem::path target;
    if (file.is_staged()) {
        target = file.filepath();
    } else if (file.scheme() == FileScheme::local) {
        target = std::filesystem::path(file.source());
        if (target.is_relative()) target = std::filesystem::absolute(target);
    } else {
        throw MissingOutputError("output " + file.source() +
                                 ": remote outputs are not supported");
    }
    std::error_code ec;
    if (!std::filesystem::exists(target, ec) || ec)
        throw MissingOutputError("declared output missing: " + target.string());
    file.set_staged_path(target);
    return file;
}

std::filesystem::path filepath(const FileRef& file) { return file.filepath(); }

}  // namespace dflow
