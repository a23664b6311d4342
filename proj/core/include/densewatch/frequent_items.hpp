#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "densewatch/common.hpp"

namespace densewatch {

/// How frequent_items() interprets its threshold fraction.
enum class FiThresholdMode {
    FractionOfMean,  ///< keep entries with lower bound >= threshold * (total_weight / entries)
    FractionOfTotal, ///< keep entries with lower bound >= threshold * total_weight
};

/// Bounded heavy-hitters summary (space-saving discipline).
///
/// At most `capacity` keys are tracked. A new key arriving at a full sketch
/// evicts the minimum-estimate entry and inherits its estimate as error
/// offset, so for every tracked key:
///   count_estimate - error_offset <= true count <= count_estimate.
class FrequentItemsSketch {
public:
    struct Entry {
        std::uint64_t count_estimate = 0;
        std::uint64_t error_offset = 0;
    };

    struct Item {
        std::uint64_t key = 0;
        std::uint64_t count_estimate = 0;
        std::uint64_t error_offset = 0;
    };

    explicit FrequentItemsSketch(std::size_t capacity);

    /// Rebuild a sketch from a serialized entry dump.
    static FrequentItemsSketch restore(std::size_t capacity, std::uint64_t total_weight,
                                       const std::vector<Item>& items);

    void update(std::uint64_t key, std::uint64_t weight = 1);

    bool contains(std::uint64_t key) const { return entries_.contains(key); }

    /// Estimate for a tracked key; 0 for untracked keys.
    std::uint64_t estimate(std::uint64_t key) const;

    /// Tracked keys whose lower-bound estimate clears the threshold, ordered
    /// by descending estimate, ties by ascending key.
    std::vector<Item> frequent_items(double threshold,
                                     FiThresholdMode mode = FiThresholdMode::FractionOfMean) const;

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    std::uint64_t total_weight() const noexcept { return total_weight_; }

    const std::unordered_map<std::uint64_t, Entry>& entries() const noexcept { return entries_; }

private:
    std::size_t capacity_;
    std::uint64_t total_weight_ = 0;
    std::unordered_map<std::uint64_t, Entry> entries_;
    // estimate -> keys at that estimate; drives min eviction deterministically
    std::map<std::uint64_t, std::set<std::uint64_t>> by_estimate_;
};

} // namespace densewatch
