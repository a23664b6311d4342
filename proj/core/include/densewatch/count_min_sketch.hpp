#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "densewatch/common.hpp"

namespace densewatch {

/// Count-min sketch over 64-bit keys.
///
/// A depth x width grid of saturating 64-bit counters. Every update adds its
/// weight to one bucket per row; a query returns the minimum over the rows,
/// which can only overestimate the true inserted mass. With width w = ceil(e/eps)
/// and depth d = ceil(ln(1/delta)), a query exceeds truth by more than eps * V
/// (V = total inserted mass) with probability at most delta.
///
/// Row hashes are derived from (seed, row), so two sketches with equal
/// dimensions and seed are bit-identical under the same update sequence.
class CountMinSketch {
public:
    CountMinSketch(std::uint32_t width, std::uint32_t depth, std::uint64_t seed);

    /// (width, depth) = (ceil(e/epsilon), ceil(ln(1/failure_prob))).
    /// Quotients within 1e-9 of an integer are snapped before the ceiling so
    /// that parameters constructed as e/w round-trip to exactly w.
    static std::pair<std::uint32_t, std::uint32_t>
    params_from_bounds(double epsilon, double failure_prob);

    void update(std::uint64_t key, std::uint64_t delta = 1);

    /// Minimum over rows of the key's bucket. Never underestimates.
    std::uint64_t query(std::uint64_t key) const;

    std::uint32_t width() const noexcept { return width_; }
    std::uint32_t depth() const noexcept { return depth_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Total inserted mass (symbol V).
    std::uint64_t total_mass() const noexcept { return total_mass_; }

    /// eps implied by the width, i.e. the eps for which width = ceil(e/eps).
    double epsilon() const noexcept;

    /// Number of updates that hit a saturated counter (clamped instead of wrapping).
    std::uint64_t saturation_events() const noexcept { return saturation_events_; }

    /// Fraction of counters that are non-zero.
    double fill_ratio() const noexcept;

    /// Sum of one row's counters; equals total_mass() unless saturation occurred.
    std::uint64_t row_sum(std::uint32_t row) const;

    /// Binary layout: magic "DWSK1", then width, depth, seed as little-endian
    /// 64-bit fields, then counters row-major as little-endian 64-bit values.
    void serialize(std::ostream& out) const;
    static CountMinSketch deserialize(std::istream& in);

    std::size_t serialized_size() const noexcept;

    bool operator==(const CountMinSketch& other) const = default;

private:
    std::size_t bucket(std::uint32_t row, std::uint64_t key) const noexcept;

    std::uint32_t width_ = 0;
    std::uint32_t depth_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t total_mass_ = 0;
    std::uint64_t saturation_events_ = 0;
    std::vector<std::uint64_t> row_a_; // per-row multipliers
    std::vector<std::uint64_t> row_b_; // per-row offsets
    std::vector<std::uint64_t> counters_; // row-major depth x width
};

} // namespace densewatch
