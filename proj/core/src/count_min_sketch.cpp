#include "densewatch/count_min_sketch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "densewatch/hashing.hpp"

namespace densewatch {

namespace {

constexpr char kMagic[5] = {'D', 'W', 'S', 'K', '1'};

void write_u64_le(std::ostream& out, std::uint64_t v) {
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

/// Ceiling with a snap for quotients that are integers up to float noise,
/// so params_from_bounds(e / w, .) recovers w rather than w + 1.
std::uint64_t snapped_ceil(double x) {
    const double rounded = std::round(x);
    if (std::abs(x - rounded) < 1e-9) return static_cast<std::uint64_t>(rounded);
    return static_cast<std::uint64_t>(std::ceil(x));
}

} // namespace

CountMinSketch::CountMinSketch(std::uint32_t width, std::uint32_t depth, std::uint64_t seed)
    : width_(width), depth_(depth), seed_(seed) {
    if (width == 0 || depth == 0) throw ParameterError("count-min sketch needs width > 0 and depth > 0");
    counters_.assign(static_cast<std::size_t>(width_) * depth_, 0);
    row_a_.resize(depth_);
    row_b_.resize(depth_);
    for (std::uint32_t r = 0; r < depth_; ++r) {
        SplitMix64 gen(mix64(seed ^ (0x51ed270b0a1f3c2dULL + r)));
        row_a_[r] = gen.next() | 1ULL; // odd multiplier
        row_b_[r] = gen.next();
    }
}

std::pair<std::uint32_t, std::uint32_t>
CountMinSketch::params_from_bounds(double epsilon, double failure_prob) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must be in (0, 1)");
    if (!(failure_prob > 0.0 && failure_prob < 1.0)) throw ParameterError("failure_prob must be in (0, 1)");
    const std::uint64_t w = snapped_ceil(std::exp(1.0) / epsilon);
    const std::uint64_t d = snapped_ceil(std::log(1.0 / failure_prob));
    return {static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(std::max<std::uint64_t>(d, 1))};
}

std::size_t CountMinSketch::bucket(std::uint32_t row, std::uint64_t key) const noexcept {
    return static_cast<std::size_t>(mix64(row_a_[row] * key + row_b_[row]) % width_);
}

void CountMinSketch::update(std::uint64_t key, std::uint64_t delta) {
    if (delta == 0) throw ParameterError("update delta must be >= 1");
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    for (std::uint32_t r = 0; r < depth_; ++r) {
        std::uint64_t& c = counters_[static_cast<std::size_t>(r) * width_ + bucket(r, key)];
        if (c > kMax - delta) {
            c = kMax;
            ++saturation_events_;
        } else {
            c += delta;
        }
    }
    if (total_mass_ > kMax - delta) {
        total_mass_ = kMax;
        ++saturation_events_;
    } else {
        total_mass_ += delta;
    }
}

std::uint64_t CountMinSketch::query(std::uint64_t key) const {
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (std::uint32_t r = 0; r < depth_; ++r) {
        best = std::min(best, counters_[static_cast<std::size_t>(r) * width_ + bucket(r, key)]);
    }
    return best;
}

double CountMinSketch::epsilon() const noexcept {
    return std::exp(1.0) / static_cast<double>(width_);
}

double CountMinSketch::fill_ratio() const noexcept {
    const auto nonzero = std::count_if(counters_.begin(), counters_.end(),
                                       [](std::uint64_t c) { return c != 0; });
    return static_cast<double>(nonzero) / static_cast<double>(counters_.size());
}

std::uint64_t CountMinSketch::row_sum(std::uint32_t row) const {
    if (row >= depth_) throw ParameterError("row out of range");
    const auto* begin = counters_.data() + static_cast<std::size_t>(row) * width_;
    return std::accumulate(begin, begin + width_, std::uint64_t{0});
}

void CountMinSketch::serialize(std::ostream& out) const {
    out.write(kMagic, sizeof(kMagic));
    write_u64_le(out, width_);
    write_u64_le(out, depth_);
    write_u64_le(out, seed_);
    for (std::uint64_t c : counters_) write_u64_le(out, c);
}

CountMinSketch CountMinSketch::deserialize(std::istream& in) {
    char magic[5];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ParameterError("bad sketch header: expected DWSK1");
    }
    const std::uint64_t width = read_u64_le(in);
    const std::uint64_t depth = read_u64_le(in);
    const std::uint64_t seed = read_u64_le(in);
    if (!in || width == 0 || depth == 0 ||
        width > std::numeric_limits<std::uint32_t>::max() ||
        depth > std::numeric_limits<std::uint32_t>::max()) {
        throw ParameterError("bad sketch dimensions");
    }
    CountMinSketch s(static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(depth), seed);
    for (std::uint64_t& c : s.counters_) c = read_u64_le(in);
    if (!in) throw ParameterError("truncated sketch payload");
    s.total_mass_ = s.row_sum(0);
    return s;
}

std::size_t CountMinSketch::serialized_size() const noexcept {
    return sizeof(kMagic) + 3 * 8 + counters_.size() * 8;
}

} // namespace densewatch
