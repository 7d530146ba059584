#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace joinagg {

using AttrId = int;

inline constexpr int kMaxAttributes = 64;

/// Set of attribute ids backed by a 64-bit mask. Iteration is in ascending id order,
/// which is also the canonical column order of every relation.
class AttrSet {
public:
    constexpr AttrSet() = default;
    constexpr explicit AttrSet(std::uint64_t bits) : bits_(bits) {}

    static constexpr AttrSet of(AttrId a) { return AttrSet(std::uint64_t{1} << a); }

    template <class Range>
    static AttrSet from(const Range& ids) {
        AttrSet s;
        for (AttrId a : ids) s.insert(a);
        return s;
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr int size() const { return std::popcount(bits_); }
    constexpr bool contains(AttrId a) const { return (bits_ >> a) & 1U; }
    constexpr bool subset_of(AttrSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool intersects(AttrSet o) const { return (bits_ & o.bits_) != 0; }

    constexpr void insert(AttrId a) { bits_ |= std::uint64_t{1} << a; }
    constexpr void erase(AttrId a) { bits_ &= ~(std::uint64_t{1} << a); }

    constexpr AttrSet operator|(AttrSet o) const { return AttrSet(bits_ | o.bits_); }
    constexpr AttrSet operator&(AttrSet o) const { return AttrSet(bits_ & o.bits_); }
    constexpr AttrSet operator-(AttrSet o) const { return AttrSet(bits_ & ~o.bits_); }
    constexpr AttrSet& operator|=(AttrSet o) { bits_ |= o.bits_; return *this; }
    constexpr AttrSet& operator&=(AttrSet o) { bits_ &= o.bits_; return *this; }
    constexpr AttrSet& operator-=(AttrSet o) { bits_ &= ~o.bits_; return *this; }
    constexpr bool operator==(const AttrSet&) const = default;
    constexpr auto operator<=>(const AttrSet&) const = default;

    /// Lowest id in the set; undefined on an empty set.
    constexpr AttrId first() const { return std::countr_zero(bits_); }

    /// Position of `a` among the members of this set (its column index).
    constexpr int rank(AttrId a) const {
        return std::popcount(bits_ & ((std::uint64_t{1} << a) - 1));
    }

    std::vector<AttrId> ids() const {
        std::vector<AttrId> out;
        out.reserve(size());
        for (AttrId a : *this) out.push_back(a);
        return out;
    }

    class iterator {
    public:
        using value_type = AttrId;
        using difference_type = std::ptrdiff_t;
        constexpr iterator() = default;
        constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}
        constexpr AttrId operator*() const { return std::countr_zero(rest_); }
        constexpr iterator& operator++() { rest_ &= rest_ - 1; return *this; }
        constexpr iterator operator++(int) { auto t = *this; ++*this; return t; }
        constexpr bool operator==(const iterator&) const = default;

    private:
        std::uint64_t rest_ = 0;
    };

    constexpr iterator begin() const { return iterator(bits_); }
    constexpr iterator end() const { return iterator(0); }

private:
    std::uint64_t bits_ = 0;
};

/// Column positions of `sub` inside a relation whose schema is `schema` (sub ⊆ schema).
inline std::vector<int> column_positions(AttrSet schema, AttrSet sub) {
    std::vector<int> pos;
    pos.reserve(sub.size());
    for (AttrId a : sub) pos.push_back(schema.rank(a));
    return pos;
}

}  // namespace joinagg
