#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "joinagg/attr_set.hpp"
#include "joinagg/error.hpp"
#include "joinagg/semiring.hpp"

namespace joinagg {

/// Interned domain value (integers verbatim, strings mapped by the loader's dictionary).
using Value = std::int64_t;

/// Annotated relation. Columns follow the ascending attribute ids of `schema`.
template <class W>
class Relation {
public:
    Relation() = default;
    explicit Relation(AttrSet schema) : schema_(schema), arity_(schema.size()) {}

    AttrSet schema() const { return schema_; }
    int arity() const { return arity_; }
    std::size_t size() const { return weights_.size(); }
    bool empty() const { return weights_.empty(); }

    const Value* row(std::size_t i) const { return cells_.data() + i * arity_; }
    std::span<const Value> tuple(std::size_t i) const { return {row(i), static_cast<std::size_t>(arity_)}; }
    typename std::vector<W>::const_reference weight(std::size_t i) const { return weights_[i]; }
    void set_weight(std::size_t i, W w) { weights_[i] = std::move(w); }

    void reserve(std::size_t n) {
        cells_.reserve(n * arity_);
        weights_.reserve(n);
    }
    void push_back(const Value* vals, W w) {
        cells_.insert(cells_.end(), vals, vals + arity_);
        weights_.push_back(std::move(w));
    }
    void push_back(std::initializer_list<Value> vals, W w) {
        if (static_cast<int>(vals.size()) != arity_) throw SchemaError("tuple arity does not match schema");
        push_back(vals.begin(), std::move(w));
    }
    /// Appends a row assembled column by column by the caller.
    Value* append_uninitialized(W w) {
        cells_.resize(cells_.size() + arity_);
        weights_.push_back(std::move(w));
        return cells_.data() + (weights_.size() - 1) * arity_;
    }

    const std::vector<Value>& cells() const { return cells_; }
    const std::vector<W>& weights() const { return weights_; }

private:
    AttrSet schema_;
    int arity_ = 0;
    std::vector<Value> cells_;
    std::vector<W> weights_;
};

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t hash_key(const Value* row, const std::vector<int>& pos) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (int p : pos) h = mix64(h ^ static_cast<std::uint64_t>(row[p])) + 0x9e3779b97f4a7c15ULL;
    return h;
}

/// Groups the rows of a relation by the values at `key_pos`.
class KeyIndex {
public:
    template <class W>
    KeyIndex(const Relation<W>& r, std::vector<int> key_pos) : KeyIndex(r.cells().data(), r.arity(), r.size(), std::move(key_pos)) {}

    KeyIndex(const Value* cells, int arity, std::size_t rows, std::vector<int> key_pos)
        : cells_(cells), arity_(arity), pos_(std::move(key_pos)), next_(rows, -1), group_of_(rows, -1) {
        std::size_t cap = 16;
        while (cap < 2 * rows) cap <<= 1;
        slots_.assign(cap, -1);
        mask_ = cap - 1;
        for (std::size_t r = 0; r < rows; ++r) {
            const Value* row = cells_ + r * arity_;
            int g = lookup(row, pos_, true);
            if (g < 0) {
                g = static_cast<int>(rep_.size());
                rep_.push_back(static_cast<int>(r));
                head_.push_back(static_cast<int>(r));
                tail_.push_back(static_cast<int>(r));
                count_.push_back(1);
                slots_[last_slot_] = g;
            } else {
                next_[tail_[g]] = static_cast<int>(r);
                tail_[g] = static_cast<int>(r);
                ++count_[g];
            }
            group_of_[r] = g;
        }
    }

    int groups() const { return static_cast<int>(rep_.size()); }
    /// Group whose key equals the values of `probe` at `probe_pos`, or -1.
    int find(const Value* probe, const std::vector<int>& probe_pos) const {
        return const_cast<KeyIndex*>(this)->lookup(probe, probe_pos, false);
    }
    int group_of(std::size_t row) const { return group_of_[row]; }
    int representative(int g) const { return rep_[g]; }
    int head(int g) const { return head_[g]; }
    int next(int row) const { return next_[row]; }
    int count(int g) const { return count_[g]; }

private:
    int lookup(const Value* probe, const std::vector<int>& probe_pos, bool inserting) {
        std::size_t s = hash_key(probe, probe_pos) & mask_;
        while (true) {
            const int g = slots_[s];
            if (g < 0) {
                if (inserting) last_slot_ = s;
                return -1;
            }
            const Value* rep = cells_ + static_cast<std::size_t>(rep_[g]) * arity_;
            bool equal = true;
            for (std::size_t i = 0; i < pos_.size() && equal; ++i) equal = rep[pos_[i]] == probe[probe_pos[i]];
            if (equal) return g;
            s = (s + 1) & mask_;
        }
    }

    const Value* cells_;
    int arity_;
    std::vector<int> pos_;
    std::vector<int> slots_;
    std::size_t mask_ = 0;
    std::size_t last_slot_ = 0;
    std::vector<int> rep_, head_, tail_, count_;
    std::vector<int> next_;
    std::vector<int> group_of_;
};

/// Per-run cost counters.
struct RunStats {
    std::uint64_t max_intermediate_rows = 0;
    std::uint64_t total_rows_materialized = 0;
    std::uint64_t semiring_ops = 0;

    void absorb(const RunStats& o) {
        max_intermediate_rows = std::max(max_intermediate_rows, o.max_intermediate_rows);
        total_rows_materialized += o.total_rows_materialized;
        semiring_ops += o.semiring_ops;
    }
};

/// Collects RunStats and enforces an optional row budget (BudgetExceeded on overflow).
class ExecContext {
public:
    explicit ExecContext(std::optional<std::uint64_t> budget = std::nullopt) : budget_(budget) {}

    /// Counts rows toward the total without registering an intermediate.
    void charge(std::uint64_t rows) {
        stats_.total_rows_materialized += rows;
        if (budget_ && stats_.total_rows_materialized > *budget_) throw BudgetExceeded("row budget exceeded");
    }
    /// Registers an intermediate result of `rows` rows whose rows were already charged.
    void note_intermediate(std::uint64_t rows) {
        stats_.max_intermediate_rows = std::max(stats_.max_intermediate_rows, rows);
    }
    void materialize(std::uint64_t rows) {
        note_intermediate(rows);
        charge(rows);
    }

    RunStats& stats() { return stats_; }
    const RunStats& stats() const { return stats_; }
    std::optional<std::uint64_t> budget() const { return budget_; }

private:
    std::optional<std::uint64_t> budget_;
    RunStats stats_;
};

namespace detail {

inline void materialize(ExecContext* ctx, std::uint64_t rows) {
    if (ctx) ctx->materialize(rows);
}

inline std::vector<int> all_positions(int arity) {
    std::vector<int> p(arity);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

}  // namespace detail

/// Merges rows with identical tuples by ⊕ (first-occurrence order is kept).
template <Semiring S>
Relation<typename S::value_type> normalize(const Relation<typename S::value_type>& a, const S& ops) {
    KeyIndex idx(a, detail::all_positions(a.arity()));
    if (idx.groups() == static_cast<int>(a.size())) return a;
    Relation<typename S::value_type> out(a.schema());
    out.reserve(idx.groups());
    for (int g = 0; g < idx.groups(); ++g) {
        int r = idx.head(g);
        auto acc = a.weight(r);
        for (r = idx.next(r); r >= 0; r = idx.next(r)) acc = ops.plus(acc, a.weight(r));
        out.push_back(a.row(idx.representative(g)), std::move(acc));
    }
    return out;
}

/// ⊕-aggregation onto the attributes `keep` (keep ⊆ schema).
template <Semiring S>
Relation<typename S::value_type> project_aggregate(const Relation<typename S::value_type>& a, AttrSet keep,
                                                   const S& ops, ExecContext* ctx = nullptr) {
    if (!keep.subset_of(a.schema())) throw SchemaError("projection onto attributes outside the schema");
    if (keep == a.schema()) return a;
    const auto pos = column_positions(a.schema(), keep);
    KeyIndex idx(a, pos);
    Relation<typename S::value_type> out(keep);
    out.reserve(idx.groups());
    for (int g = 0; g < idx.groups(); ++g) {
        int r = idx.head(g);
        auto acc = a.weight(r);
        for (r = idx.next(r); r >= 0; r = idx.next(r)) acc = ops.plus(acc, a.weight(r));
        Value* dst = out.append_uninitialized(std::move(acc));
        const Value* src = a.row(idx.representative(g));
        for (std::size_t i = 0; i < pos.size(); ++i) dst[i] = src[pos[i]];
    }
    detail::materialize(ctx, out.size());
    return out;
}

/// Distinct projection onto `keep` with every annotation set to `one`.
template <class W>
Relation<W> project_keys(const Relation<W>& a, AttrSet keep, const W& one) {
    const auto pos = column_positions(a.schema(), keep);
    KeyIndex idx(a, pos);
    Relation<W> out(keep);
    out.reserve(idx.groups());
    for (int g = 0; g < idx.groups(); ++g) {
        Value* dst = out.append_uninitialized(one);
        const Value* src = a.row(idx.representative(g));
        for (std::size_t i = 0; i < pos.size(); ++i) dst[i] = src[pos[i]];
    }
    return out;
}

namespace detail {

/// Rows of `a` whose projection on the shared attributes does (keep_matches) or does not occur in `b`.
template <class W, class V>
Relation<W> filter_by(const Relation<W>& a, const Relation<V>& b, bool keep_matches, ExecContext* ctx) {
    const AttrSet common = a.schema() & b.schema();
    if (!common.subset_of(b.schema())) throw SchemaError("filter keys outside the schema");
    Relation<W> out(a.schema());
    if (common.empty()) {
        if (b.empty() != keep_matches) out = a;
    } else {
        const auto pa = column_positions(a.schema(), common);
        KeyIndex idx(b, column_positions(b.schema(), common));
        for (std::size_t r = 0; r < a.size(); ++r)
            if ((idx.find(a.row(r), pa) >= 0) == keep_matches) out.push_back(a.row(r), a.weight(r));
    }
    detail::materialize(ctx, out.size());
    return out;
}

}  // namespace detail

/// a ⋉ b: rows of a matching b on their common attributes; annotations untouched.
template <class W, class V>
Relation<W> semi_join(const Relation<W>& a, const Relation<V>& b, ExecContext* ctx = nullptr) {
    return detail::filter_by(a, b, true, ctx);
}

/// a ▷ keys: rows of a matching no key; `keys` must range over a subset of a's schema.
template <class W, class V>
Relation<W> anti_semi_join(const Relation<W>& a, const Relation<V>& keys, ExecContext* ctx = nullptr) {
    if (!keys.schema().subset_of(a.schema())) throw SchemaError("anti-semi-join keys outside the schema");
    return detail::filter_by(a, keys, false, ctx);
}

/**
 * ⊕_{(a ∪ b) − keep}(a ⋈ b) without storing the join. The number of joined pairs is
 * recorded as the intermediate size, as if the join had been materialized.
 */
template <Semiring S>
Relation<typename S::value_type> join_aggregate(const Relation<typename S::value_type>& a,
                                                const Relation<typename S::value_type>& b, AttrSet keep,
                                                const S& ops, ExecContext* ctx = nullptr) {
    using W = typename S::value_type;
    const AttrSet all = a.schema() | b.schema();
    if (!keep.subset_of(all)) throw SchemaError("aggregation keeps attributes outside the join");
    const AttrSet common = a.schema() & b.schema();
    KeyIndex idx(b, column_positions(b.schema(), common));
    const auto pa = column_positions(a.schema(), common);

    // Each kept column comes from a (preferred) or b.
    std::vector<std::pair<bool, int>> src;
    for (AttrId x : keep) {
        if (a.schema().contains(x))
            src.emplace_back(true, a.schema().rank(x));
        else
            src.emplace_back(false, b.schema().rank(x));
    }
    const bool is_plain_join = keep == all;
    Relation<W> out(keep);
    // Output groups by kept values; probe key built on a scratch row.
    std::vector<Value> scratch(keep.size());
    std::vector<int> scratch_pos = detail::all_positions(keep.size());
    std::vector<int> slots(64, -1);
    std::size_t mask = 63;
    std::uint64_t pairs = 0;

    auto grow = [&] {
        std::vector<int> fresh(slots.size() * 2, -1);
        const std::size_t m = fresh.size() - 1;
        for (std::size_t g = 0; g < out.size(); ++g) {
            std::size_t s = hash_key(out.row(g), scratch_pos) & m;
            while (fresh[s] >= 0) s = (s + 1) & m;
            fresh[s] = static_cast<int>(g);
        }
        slots.swap(fresh);
        mask = m;
    };

    for (std::size_t ra = 0; ra < a.size(); ++ra) {
        const int g = idx.find(a.row(ra), pa);
        if (g < 0) continue;
        const std::uint64_t matches = static_cast<std::uint64_t>(idx.count(g));
        pairs += matches;
        if (ctx) ctx->charge(matches);
        for (int rb = idx.head(g); rb >= 0; rb = idx.next(rb)) {
            const Value* ra_row = a.row(ra);
            const Value* rb_row = b.row(rb);
            for (std::size_t i = 0; i < src.size(); ++i)
                scratch[i] = src[i].first ? ra_row[src[i].second] : rb_row[src[i].second];
            W w = ops.times(a.weight(ra), b.weight(rb));
            if (is_plain_join) {
                out.push_back(scratch.data(), std::move(w));
                continue;
            }
            std::size_t s = hash_key(scratch.data(), scratch_pos) & mask;
            int found = -1;
            while (slots[s] >= 0) {
                const Value* o = out.row(slots[s]);
                if (std::equal(scratch.begin(), scratch.end(), o)) {
                    found = slots[s];
                    break;
                }
                s = (s + 1) & mask;
            }
            if (found >= 0) {
                out.set_weight(found, ops.plus(out.weight(found), w));
            } else {
                slots[s] = static_cast<int>(out.size());
                out.push_back(scratch.data(), std::move(w));
                if (out.size() * 2 > slots.size()) grow();
            }
        }
    }
    if (ctx) ctx->note_intermediate(pairs);
    return out;
}

/// Natural join; annotations multiply.
template <Semiring S>
Relation<typename S::value_type> join(const Relation<typename S::value_type>& a, const Relation<typename S::value_type>& b,
                                      const S& ops, ExecContext* ctx = nullptr) {
    return join_aggregate(a, b, a.schema() | b.schema(), ops, ctx);
}

/// Key-wise ⊕ of relations with identical schemas.
template <Semiring S>
Relation<typename S::value_type> merge_results(const std::vector<Relation<typename S::value_type>>& parts, const S& ops,
                                               ExecContext* ctx = nullptr) {
    if (parts.empty()) return {};
    Relation<typename S::value_type> all(parts.front().schema());
    for (const auto& p : parts) {
        if (p.schema() != all.schema()) throw SchemaError("merging results with different schemas");
        for (std::size_t r = 0; r < p.size(); ++r) all.push_back(p.row(r), p.weight(r));
    }
    auto out = normalize(all, ops);
    detail::materialize(ctx, out.size());
    return out;
}

/// Rows ordered by tuple values (for deterministic output).
template <class W>
Relation<W> sorted(const Relation<W>& a) {
    std::vector<std::size_t> order(a.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::lexicographical_compare(a.row(x), a.row(x) + a.arity(), a.row(y), a.row(y) + a.arity());
    });
    Relation<W> out(a.schema());
    out.reserve(a.size());
    for (std::size_t r : order) out.push_back(a.row(r), a.weight(r));
    return out;
}

/// Same tuples and annotations regardless of row order; for tests and the oracle harness.
template <class W>
bool same_result(const Relation<W>& a, const Relation<W>& b) {
    if (a.schema() != b.schema() || a.size() != b.size()) return false;
    const auto sa = sorted(a), sb = sorted(b);
    return sa.cells() == sb.cells() && sa.weights() == sb.weights();
}

}  // namespace joinagg
