#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "densewatch/snapshot.hpp"

namespace densewatch {

/// A parsed stream line, keeping the raw endpoint labels for reporting.
struct RawEvent {
    std::string src_label;
    std::string dst_label;
    EdgeEvent event;
};

struct TickBatch {
    std::uint64_t tick = 0;
    std::vector<RawEvent> events;
};

struct StreamStats {
    std::uint64_t parsed = 0;
    std::uint64_t malformed = 0;
    std::uint64_t late = 0; ///< events older than the tick being filled; folded forward
    bool any_label = false;
    bool all_labeled = true;
};

/// Epoch seconds from either a non-negative integer or an ISO-8601 timestamp
/// of the form YYYY-MM-DDTHH:MM:SS with optional trailing 'Z'.
std::optional<std::uint64_t> parse_timestamp(std::string_view text);

/// Reads `src,dst,timestamp[,label]` lines and groups them into tick batches
/// (tick = timestamp / tick_width). Lines that fail to parse are counted and
/// skipped; out-of-order events are folded into the batch being filled.
class EdgeStreamReader {
public:
    EdgeStreamReader(std::istream& in, std::uint64_t tick_width);

    /// Next tick batch, or nullopt at end of stream.
    std::optional<TickBatch> next();

    const StreamStats& stats() const noexcept { return stats_; }

private:
    std::optional<RawEvent> parse_line(const std::string& line);

    std::istream& in_;
    std::uint64_t tick_width_;
    StreamStats stats_;
    std::optional<RawEvent> pending_;
    bool exhausted_ = false;
};

} // namespace densewatch
