#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace moment_ensemble {

/// A d-tuple of natural numbers indexing a moment, with order |k| = k_1 + ... + k_d.
///
/// Multi-indices compare graded-lexicographically: first by order, then
/// lexicographically by entries. Comparing indices of different length throws.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<unsigned> entries);
    MultiIndex(std::initializer_list<unsigned> entries);

    static MultiIndex zero(std::size_t d) { return MultiIndex(std::vector<unsigned>(d, 0u)); }

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] unsigned order() const noexcept { return order_; }
    [[nodiscard]] unsigned operator[](std::size_t axis) const { return entries_[axis]; }
    [[nodiscard]] std::span<const unsigned> entries() const noexcept { return entries_; }

    [[nodiscard]] MultiIndex operator+(const MultiIndex& other) const;
    // Componentwise k <= n.
    [[nodiscard]] bool dominated_by(const MultiIndex& other) const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
    friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b);

private:
    std::vector<unsigned> entries_;
    unsigned order_ = 0;
};

/// All k in N^d with |k| <= max_order, in graded-lex order. Count is C(max_order + d, d).
[[nodiscard]] std::vector<MultiIndex> enumerate_multiindices(std::size_t d, unsigned max_order);

/// All k with 0 <= k <= upper componentwise, in lexicographic order.
[[nodiscard]] std::vector<MultiIndex> enumerate_box(const MultiIndex& upper);

/// Dense rank lookup for { k in N^d : |k| <= N }.
class MultiIndexSet {
public:
    MultiIndexSet(std::size_t d, unsigned max_order);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] unsigned max_order() const noexcept { return max_order_; }
    [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
    [[nodiscard]] const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
    [[nodiscard]] const MultiIndex& at(std::size_t rank) const { return indices_.at(rank); }

    [[nodiscard]] bool contains(const MultiIndex& k) const noexcept;
    // Throws InvalidArgument when k lies outside the truncation.
    [[nodiscard]] std::size_t rank(const MultiIndex& k) const;
    [[nodiscard]] std::size_t rank(std::span<const unsigned> k) const;

private:
    std::size_t dim_;
    unsigned max_order_;
    std::vector<MultiIndex> indices_;
    // Box (N+1)^d -> rank, or npos outside the simplex.
    std::vector<std::size_t> box_to_rank_;
};

using MultiIndexSetPtr = std::shared_ptr<const MultiIndexSet>;

// Cached shared index sets keyed on (d, N).
[[nodiscard]] MultiIndexSetPtr shared_index_set(std::size_t d, unsigned max_order);

} // namespace moment_ensemble
