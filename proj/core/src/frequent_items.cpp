#include "densewatch/frequent_items.hpp"

#include <algorithm>

namespace densewatch {

FrequentItemsSketch::FrequentItemsSketch(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ParameterError("frequent-items capacity must be >= 1");
}

FrequentItemsSketch FrequentItemsSketch::restore(std::size_t capacity, std::uint64_t total_weight,
                                                 const std::vector<Item>& items) {
    FrequentItemsSketch s(capacity);
    if (items.size() > capacity) throw ParameterError("more entries than capacity");
    for (const auto& item : items) {
        if (item.error_offset > item.count_estimate) throw ParameterError("offset exceeds estimate");
        s.entries_.emplace(item.key, Entry{item.count_estimate, item.error_offset});
        s.by_estimate_[item.count_estimate].insert(item.key);
    }
    if (s.entries_.size() != items.size()) throw ParameterError("duplicate keys in entry dump");
    s.total_weight_ = total_weight;
    return s;
}

void FrequentItemsSketch::update(std::uint64_t key, std::uint64_t weight) {
    if (weight == 0) throw ParameterError("update weight must be >= 1");
    total_weight_ += weight;

    auto it = entries_.find(key);
    if (it != entries_.end()) {
        auto& bucket = by_estimate_[it->second.count_estimate];
        bucket.erase(key);
        if (bucket.empty()) by_estimate_.erase(it->second.count_estimate);
        it->second.count_estimate += weight;
        by_estimate_[it->second.count_estimate].insert(key);
        return;
    }

    std::uint64_t inherited = 0;
    if (entries_.size() >= capacity_) {
        auto min_bucket = by_estimate_.begin();
        // smallest estimate; among those, the largest key goes first
        const std::uint64_t victim = *min_bucket->second.rbegin();
        inherited = min_bucket->first;
        min_bucket->second.erase(victim);
        if (min_bucket->second.empty()) by_estimate_.erase(min_bucket);
        entries_.erase(victim);
    }
    entries_.emplace(key, Entry{inherited + weight, inherited});
    by_estimate_[inherited + weight].insert(key);
}

std::uint64_t FrequentItemsSketch::estimate(std::uint64_t key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.count_estimate;
}

std::vector<FrequentItemsSketch::Item>
FrequentItemsSketch::frequent_items(double threshold, FiThresholdMode mode) const {
    if (threshold < 0.0 || threshold > 1.0) throw ParameterError("threshold must be in [0, 1]");
    std::vector<Item> out;
    if (entries_.empty()) return out;

    const double reference = mode == FiThresholdMode::FractionOfMean
        ? static_cast<double>(total_weight_) / static_cast<double>(entries_.size())
        : static_cast<double>(total_weight_);
    const double cut = threshold * reference;

    out.reserve(entries_.size());
    for (const auto& [key, entry] : entries_) {
        const std::uint64_t lower = entry.count_estimate - entry.error_offset;
        if (static_cast<double>(lower) >= cut) {
            out.push_back(Item{key, entry.count_estimate, entry.error_offset});
        }
    }
    std::sort(out.begin(), out.end(), [](const Item& a, const Item& b) {
        if (a.count_estimate != b.count_estimate) return a.count_estimate > b.count_estimate;
        return a.key < b.key;
    });
    return out;
}

} // namespace densewatch
