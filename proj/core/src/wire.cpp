#include "dflow/wire.hpp"

#include <bit>
#include <cstring>

#include "dflow/errors.hpp"

namespace dflow::wire {

namespace {

enum class Tag : std::uint8_t {
    null = 0,
    int64 = 1,
    float64 = 2,
    boolean = 3,
    text = 4,
    bytes = 5,
    blob = 6,
    file_ref = 7,
    future_ref = 8,
    data_future_ref = 9,
    list = 10,
    map = 11,
};

void put_u8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
    put_u32(out, static_cast<std::uint32_t>(v));
}

void put_str(std::vector<std::uint8_t>& out, std::string_view s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

void put_raw(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& b) {
    put_u32(out, static_cast<std::uint32_t>(b.size()));
    out.insert(out.end(), b.begin(), b.end());
}

struct Cursor {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > data.size()) throw WireError("truncated value encoding");
    }
    std::uint8_t u8() {
        need(1);
        return data[pos++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = (std::uint32_t(data[pos]) << 24) | (std::uint32_t(data[pos + 1]) << 16) |
                          (std::uint32_t(data[pos + 2]) << 8) | std::uint32_t(data[pos + 3]);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t hi = u32();
        return (hi << 32) | u32();
    }
    std::string str() {
        std::uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(data.data() + pos), n);
        pos += n;
        return s;
    }
    std::vector<std::uint8_t> raw() {
        std::uint32_t n = u32();
        need(n);
        std::vector<std::uint8_t> b(data.begin() + pos, data.begin() + pos + n);
        pos += n;
        return b;
    }
};

ArgValue decode_one(Cursor& c);

struct Encoder {
    std::vector<std::uint8_t>& out;

    void operator()(std::monostate) { put_u8(out, std::uint8_t(Tag::null)); }
    void operator()(std::int64_t v) {
        put_u8(out, std::uint8_t(Tag::int64));
        put_u64(out, static_cast<std::uint64_t>(v));
    }
    void operator()(double v) {
        put_u8(out, std::uint8_t(Tag::float64));
        put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    void operator()(bool v) {
        put_u8(out, std::uint8_t(Tag::boolean));
        put_u8(out, v ? 1 : 0);
    }
    void operator()(const std::string& v) {
        put_u8(out, std::uint8_t(Tag::text));
        put_str(out, v);
    }
    void operator()(const Bytes& v) {
        put_u8(out, std::uint8_t(Tag::bytes));
        put_raw(out, v.data);
    }
    void operator()(const Blob& v) {
        put_u8(out, std::uint8_t(Tag::blob));
        put_raw(out, v.data);
    }
    void operator()(const FileRef& v) {
        put_u8(out, std::uint8_t(Tag::file_ref));
        put_u8(out, static_cast<std::uint8_t>(v.scheme()));
        put_str(out, v.source());
        put_str(out, v.is_staged() ? v.filepath().string() : std::string());
    }
    void operator()(const FutureRef& v) {
        put_u8(out, std::uint8_t(Tag::future_ref));
        put_u64(out, v.task.value);
    }
    void operator()(const DataFutureRef& v) {
        put_u8(out, std::uint8_t(Tag::data_future_ref));
        put_u64(out, v.task.value);
        put_u32(out, static_cast<std::uint32_t>(v.output_index));
    }
    void operator()(const ArgList& v) {
        put_u8(out, std::uint8_t(Tag::list));
        put_u32(out, static_cast<std::uint32_t>(v.size()));
        for (const auto& item : v) encode_value(out, item);
    }
    void operator()(const ArgMap& v) {
        put_u8(out, std::uint8_t(Tag::map));
        put_u32(out, static_cast<std::uint32_t>(v.size()));
        for (const auto& [k, item] : v) {
            put_str(out, k);
            encode_value(out, item);
        }
    }
};

ArgValue decode_one(Cursor& c) {
    switch (static_cast<Tag>(c.u8())) {
        case Tag::null: return ArgValue();
        case Tag::int64: return ArgValue(static_cast<std::int64_t>(c.u64()));
        case Tag::float64: return ArgValue(std::bit_cast<double>(c.u64()));
        case Tag::boolean: return ArgValue(c.u8() != 0);
        case Tag::text: return ArgValue(c.str());
        case Tag::bytes: return ArgValue(Bytes{c.raw()});
        case Tag::blob: return ArgValue(Blob{c.raw()});
        case Tag::file_ref: {
            auto scheme = c.u8();
            if (scheme > 2) throw WireError("bad file scheme tag");
            std::string source = c.str();
            std::string staged = c.str();
            FileRef f(source);
            if (!staged.empty()) f.set_staged_path(staged);
            return ArgValue(std::move(f));
        }
        case Tag::future_ref: return ArgValue(FutureRef{TaskId(c.u64())});
        case Tag::data_future_ref: {
            TaskId id(c.u64());
            std::size_t idx = c.u32();
            return ArgValue(DataFutureRef{id, idx});
        }
        case Tag::list: {
            std::uint32_t n = c.u32();
            ArgList out;
            out.reserve(n);
            for (std::uint32_t i = 0; i < n; ++i) out.push_back(decode_one(c));
            return ArgValue(std::move(out));
        }
        case Tag::map: {
            std::uint32_t n = c.u32();
            ArgMap out;
            for (std::uint32_t i = 0; i < n; ++i) {
                std::string k = c.str();
                out.emplace(std::move(k), decode_one(c));
            }
            return ArgValue(std::move(out));
        }
    }
    throw WireError("unknown value tag");
}

}  // namespace

void encode_value(std::vector<std::uint8_t>& out, const ArgValue& v) {
    std::visit(Encoder{out}, v.storage());
}

std::vector<std::uint8_t> encode_value(const ArgValue& v) {
    std::vector<std::uint8_t> out;
    encode_value(out, v);
    return out;
}

ArgValue decode_value(std::span<const std::uint8_t> bytes) {
    Cursor c{bytes};
    ArgValue v = decode_one(c);
    if (c.pos != bytes.size()) throw WireError("trailing bytes after value");
    return v;
}

std::vector<std::uint8_t> encode_frame(const Frame& f) {
    std::vector<std::uint8_t> out;
    out.reserve(kFrameHeaderBytes + f.payload.size());
    put_u32(out, static_cast<std::uint32_t>(1 + 8 + f.payload.size()));
    put_u8(out, static_cast<std::uint8_t>(f.kind));
    put_u64(out, f.task_id);
    out.insert(out.end(), f.payload.begin(), f.payload.end());
    return out;
}

void FrameReader::feed(std::span<const std::uint8_t> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameReader::next() {
    // Compact once the consumed prefix dominates the buffer.
    if (consumed_ > 4096 && consumed_ * 2 > buf_.size()) {
        buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(consumed_));
        consumed_ = 0;
    }
    std::size_t avail = buf_.size() - consumed_;
    if (avail < 4) return std::nullopt;
    const std::uint8_t* p = buf_.data() + consumed_;
    std::uint32_t length = (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
                           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
    if (length < 9 || length > 9 + kMaxFramePayload)
        throw WireError("bad frame length " + std::to_string(length));
    if (avail < 4 + static_cast<std::size_t>(length)) return std::nullopt;
    Frame f;
    std::uint8_t kind = p[4];
    if (kind > 3) throw WireError("bad frame kind " + std::to_string(kind));
    f.kind = static_cast<FrameKind>(kind);
    std::uint64_t id = 0;
    for (int i = 0; i < 8; ++i) id = (id << 8) | p[5 + i];
    f.task_id = id;
    f.payload.assign(p + 13, p + 4 + length);
    consumed_ += 4 + static_cast<std::size_t>(length);
    return f;
}

ArgValue outcome_to_value(const Outcome& o) {
    ArgMap m;
    m.emplace("ok", ArgValue(o.ok()));
    if (o.ok()) {
        m.emplace("value", o.get_value());
    } else {
        const auto& e = o.get_error();
        m.emplace("kind", ArgValue(std::string(to_string(e.kind))));
        m.emplace("message", ArgValue(e.message));
        m.emplace("exit_code", ArgValue(static_cast<std::int64_t>(e.exit_code)));
        ArgList failed;
        failed.reserve(e.failed_tasks.size());
        for (TaskId t : e.failed_tasks) failed.emplace_back(static_cast<std::int64_t>(t.value));
        m.emplace("failed", ArgValue(std::move(failed)));
        if (e.file) m.emplace("file", ArgValue(*e.file));
    }
    return ArgValue(std::move(m));
}

Outcome outcome_from_value(const ArgValue& v) {
    const auto& m = v.as<ArgMap>();
    if (m.at("ok").as_bool()) return Outcome::value(m.at("value"));
    ErrorInfo e;
    std::string kind = m.at("kind").as_text();
    bool known = false;
    for (int k = 0; k <= static_cast<int>(ErrorKind::cancelled); ++k) {
        if (kind == to_string(static_cast<ErrorKind>(k))) {
            e.kind = static_cast<ErrorKind>(k);
            known = true;
            break;
        }
    }
    if (!known) throw WireError("unknown error kind: " + kind);
    e.message = m.at("message").as_text();
    e.exit_code = static_cast<int>(m.at("exit_code").as_int());
    for (const auto& t : m.at("failed").as<ArgList>())
        e.failed_tasks.push_back(TaskId(static_cast<std::uint64_t>(t.as_int())));
    if (auto it = m.find("file"); it != m.end()) e.file = it->second.as<FileRef>();
    return Outcome::error(std::move(e));
}

}  // namespace dflow::wire
