#include "moment_ensemble/multiindex.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include "moment_ensemble/errors.hpp"

namespace moment_ensemble {

namespace {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
}

MultiIndex::MultiIndex(std::vector<unsigned> entries)
    : entries_(std::move(entries)), order_(std::accumulate(entries_.begin(), entries_.end(), 0u)) {}

MultiIndex::MultiIndex(std::initializer_list<unsigned> entries) : MultiIndex(std::vector<unsigned>(entries)) {}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    if (size() != other.size())
        throw InvalidArgument("multi-index length mismatch: " + to_string() + " + " + other.to_string());
    std::vector<unsigned> sum(entries_);
    for (std::size_t j = 0; j < sum.size(); ++j)
        sum[j] += other.entries_[j];
    return MultiIndex(std::move(sum));
}

bool MultiIndex::dominated_by(const MultiIndex& other) const {
    if (size() != other.size())
        return false;
    for (std::size_t j = 0; j < size(); ++j)
        if (entries_[j] > other.entries_[j])
            return false;
    return true;
}

std::string MultiIndex::to_string() const {
    std::string out = "(";
    for (std::size_t j = 0; j < entries_.size(); ++j) {
        if (j)
            out += ",";
        out += std::to_string(entries_[j]);
    }
    return out + ")";
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size())
        throw InvalidArgument("cannot compare multi-indices of length " + std::to_string(a.size()) + " and " +
                              std::to_string(b.size()));
    if (auto c = a.order_ <=> b.order_; c != 0)
        return c;
    return std::lexicographical_compare_three_way(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                                                  b.entries_.end());
}

namespace {

// Appends every k with |k| == order, lexicographically.
void append_order(std::size_t d, unsigned order, std::vector<unsigned>& prefix, std::vector<MultiIndex>& out) {
    const std::size_t axis = prefix.size();
    const unsigned used = std::accumulate(prefix.begin(), prefix.end(), 0u);
    if (axis + 1 == d) {
        prefix.push_back(order - used);
        out.emplace_back(prefix);
        prefix.pop_back();
        return;
    }
    for (unsigned v = 0; v + used <= order; ++v) {
        prefix.push_back(v);
        append_order(d, order, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

std::vector<MultiIndex> enumerate_multiindices(std::size_t d, unsigned max_order) {
    if (d == 0)
        throw InvalidArgument("multi-index dimension must be at least 1");
    std::vector<MultiIndex> out;
    std::vector<unsigned> prefix;
    prefix.reserve(d);
    for (unsigned order = 0; order <= max_order; ++order)
        append_order(d, order, prefix, out);
    return out;
}

std::vector<MultiIndex> enumerate_box(const MultiIndex& upper) {
    const std::size_t d = upper.size();
    std::vector<MultiIndex> out;
    std::vector<unsigned> current(d, 0u);
    while (true) {
        out.emplace_back(current);
        std::size_t axis = d;
        while (axis > 0) {
            --axis;
            if (current[axis] < upper[axis]) {
                ++current[axis];
                std::fill(current.begin() + static_cast<std::ptrdiff_t>(axis) + 1, current.end(), 0u);
                break;
            }
            if (axis == 0)
                return out;
        }
        if (d == 0)
            return out;
    }
}

MultiIndexSet::MultiIndexSet(std::size_t d, unsigned max_order)
    : dim_(d), max_order_(max_order), indices_(enumerate_multiindices(d, max_order)) {
    std::size_t box = 1;
    for (std::size_t j = 0; j < d; ++j)
        box *= max_order + 1;
    box_to_rank_.assign(box, npos);
    for (std::size_t r = 0; r < indices_.size(); ++r) {
        std::size_t flat = 0;
        for (unsigned e : indices_[r].entries())
            flat = flat * (max_order + 1) + e;
        box_to_rank_[flat] = r;
    }
}

bool MultiIndexSet::contains(const MultiIndex& k) const noexcept {
    return k.size() == dim_ && k.order() <= max_order_;
}

std::size_t MultiIndexSet::rank(std::span<const unsigned> k) const {
    if (k.size() != dim_)
        throw InvalidArgument("multi-index has length " + std::to_string(k.size()) + ", expected " +
                              std::to_string(dim_));
    std::size_t flat = 0;
    unsigned order = 0;
    for (unsigned e : k) {
        order += e;
        if (order > max_order_)
            break;
        flat = flat * (max_order_ + 1) + e;
    }
    if (order > max_order_)
        throw InvalidArgument("moment index of order " + std::to_string(order) + " lies beyond truncation order " +
                              std::to_string(max_order_));
    return box_to_rank_[flat];
}

std::size_t MultiIndexSet::rank(const MultiIndex& k) const { return rank(k.entries()); }

MultiIndexSetPtr shared_index_set(std::size_t d, unsigned max_order) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, unsigned>, MultiIndexSetPtr> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{d, max_order}];
    if (!slot)
        slot = std::make_shared<const MultiIndexSet>(d, max_order);
    return slot;
}

} // namespace moment_ensemble
