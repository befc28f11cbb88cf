#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dflow/arg_value.hpp"
#include "dflow/outcome.hpp"

namespace dflow::wire {

/// Worker wire protocol. Every message is one frame:
///
///   u32 big-endian length   (bytes that follow: 1 + 8 + |payload|)
///   u8  kind                (0=task, 1=result, 2=heartbeat, 3=shutdown)
///   u64 big-endian task id
///   payload bytes
///
/// Heartbeats flow worker -> executor every heartbeat_interval; after
/// missed_heartbeat_limit intervals with no frame the worker is presumed
/// dead.
enum class FrameKind : std::uint8_t { task = 0, result = 1, heartbeat = 2, shutdown = 3 };

inline constexpr std::uint32_t kFrameHeaderBytes = 4 + 1 + 8;
inline constexpr std::uint32_t kMaxFramePayload = 64u * 1024u * 1024u;

struct Frame {
    FrameKind kind = FrameKind::heartbeat;
    std::uint64_t task_id = 0;
    std::vector<std::uint8_t> payload;

    bool operator==(const Frame&) const = default;
};

std::vector<std::uint8_t> encode_frame(const Frame& f);

/// Incremental decoder for a byte stream: feed() arbitrary chunks, next()
/// pops complete frames. Throws WireError on a malformed header.
class FrameReader {
  public:
    void feed(std::span<const std::uint8_t> bytes);
    std::optional<Frame> next();

  private:
    std::vector<std::uint8_t> buf_;
    std::size_t consumed_ = 0;
};

/// Self-describing binary encoding of ArgValue trees (tag byte, big-endian
/// fixed-width numbers, u32-length-prefixed strings/bytes/containers).
/// Task payloads and results cross the worker wire in this encoding.
void encode_value(std::vector<std::uint8_t>& out, const ArgValue& v);
std::vector<std::uint8_t> encode_value(const ArgValue& v);

/// Throws WireError on malformed input or trailing bytes.
ArgValue decode_value(std::span<const std::uint8_t> bytes);

/// Outcomes are transported as ArgValue maps.
ArgValue outcome_to_value(const Outcome& o);
Outcome outcome_from_value(const ArgValue& v);

}  // namespace dflow::wire
