#include "densewatch/stream.hpp"

#include <array>
#include <charconv>
#include <istream>

#include "densewatch/hashing.hpp"

namespace densewatch {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Howard Hinnant's days-from-civil; avoids timezone machinery.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::optional<std::uint64_t> parse_iso8601(std::string_view s) {
    // YYYY-MM-DDTHH:MM:SS with optional trailing Z; space accepted for T
    if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
    if (s.size() != 19) return std::nullopt;
    if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':')
        return std::nullopt;
    auto year = parse_u64(s.substr(0, 4));
    auto month = parse_u64(s.substr(5, 2));
    auto day = parse_u64(s.substr(8, 2));
    auto hour = parse_u64(s.substr(11, 2));
    auto minute = parse_u64(s.substr(14, 2));
    auto second = parse_u64(s.substr(17, 2));
    if (!year || !month || !day || !hour || !minute || !second) return std::nullopt;
    if (*month < 1 || *month > 12 || *day < 1 || *day > 31) return std::nullopt;
    if (*hour > 23 || *minute > 59 || *second > 60) return std::nullopt;
    const std::int64_t days = days_from_civil(static_cast<std::int64_t>(*year),
                                              static_cast<unsigned>(*month),
                                              static_cast<unsigned>(*day));
    const std::int64_t epoch = days * 86400 + static_cast<std::int64_t>(*hour) * 3600 +
                               static_cast<std::int64_t>(*minute) * 60 +
                               static_cast<std::int64_t>(*second);
    if (epoch < 0) return std::nullopt;
    return static_cast<std::uint64_t>(epoch);
}

} // namespace

std::optional<std::uint64_t> parse_timestamp(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (auto v = parse_u64(text)) return v;
    return parse_iso8601(text);
}

EdgeStreamReader::EdgeStreamReader(std::istream& in, std::uint64_t tick_width)
    : in_(in), tick_width_(tick_width) {
    if (tick_width_ == 0) throw ParameterError("tick width must be >= 1");
}

std::optional<RawEvent> EdgeStreamReader::parse_line(const std::string& line) {
    std::string_view rest = line;
    if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
    if (trim(rest).empty()) return std::nullopt;

    std::array<std::string_view, 5> fields;
    std::size_t n = 0;
    while (n < fields.size()) {
        const auto comma = rest.find(',');
        fields[n++] = rest.substr(0, comma);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (n < 3 || n > 4) return std::nullopt;

    const auto src = trim(fields[0]);
    const auto dst = trim(fields[1]);
    if (src.empty() || dst.empty()) return std::nullopt;
    const auto ts = parse_timestamp(fields[2]);
    if (!ts) return std::nullopt;

    RawEvent ev;
    ev.src_label.assign(src);
    ev.dst_label.assign(dst);
    ev.event.src = fnv1a64(src);
    ev.event.dst = fnv1a64(dst);
    ev.event.tick = *ts / tick_width_;
    if (n == 4) {
        const auto label = trim(fields[3]);
        if (label == "0") ev.event.anomalous = false;
        else if (label == "1") ev.event.anomalous = true;
        else return std::nullopt;
    }
    return ev;
}

std::optional<TickBatch> EdgeStreamReader::next() {
    TickBatch batch;
    bool started = false;

    if (pending_) {
        batch.tick = pending_->event.tick;
        batch.events.push_back(std::move(*pending_));
        pending_.reset();
        started = true;
    }

    std::string line;
    while (!exhausted_ && std::getline(in_, line)) {
        auto parsed = parse_line(line);
        if (!parsed) {
            if (!trim(line).empty()) ++stats_.malformed;
            continue;
        }
        ++stats_.parsed;
        if (parsed->event.anomalous.has_value()) stats_.any_label = true;
        else stats_.all_labeled = false;

        if (!started) {
            batch.tick = parsed->event.tick;
            batch.events.push_back(std::move(*parsed));
            started = true;
        } else if (parsed->event.tick == batch.tick) {
            batch.events.push_back(std::move(*parsed));
        } else if (parsed->event.tick < batch.tick) {
            ++stats_.late;
            parsed->event.tick = batch.tick;
            batch.events.push_back(std::move(*parsed));
        } else {
            pending_ = std::move(parsed);
            return batch;
        }
    }
    exhausted_ = true;
    if (!started) return std::nullopt;
    return batch;
}

} // namespace densewatch
