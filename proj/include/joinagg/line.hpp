#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <vector>

#include "joinagg/yannakakis.hpp"

namespace joinagg {

/// ⌈√x⌉ computed exactly.
inline std::uint64_t ceil_sqrt(std::uint64_t x) {
    if (x <= 1) return x;
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(x)));
    while (r > 0 && (r > 0xFFFFFFFFULL || r * r >= x)) --r;
    while (r < (1ULL << 32) && r * r < x) ++r;
    return r;
}

/// Path-shaped join tree whose node i hosts relation shape.edges[i].
inline JoinTree line_tree(const Query& q, const LineShape& shape) {
    std::vector<JoinTreeNode> nodes;
    for (EdgeId e : shape.edges) nodes.push_back({q.edge(e).attrs, e, {e}});
    JoinTree t(std::move(nodes));
    for (int i = 0; i + 1 < t.size(); ++i) t.add_edge(i, i + 1);
    return t;
}

/// Heavy and light values of `attr` in t_i: the number of rows per value against `threshold`.
template <class W>
std::pair<Relation<W>, Relation<W>> classify_heavy(const Relation<W>& t_i, AttrId attr, std::uint64_t threshold,
                                                   const W& one) {
    const AttrSet key = AttrSet::of(attr);
    KeyIndex idx(t_i, column_positions(t_i.schema(), key));
    Relation<W> heavy(key), light(key);
    const int col = t_i.schema().rank(attr);
    for (int g = 0; g < idx.groups(); ++g) {
        const Value v = t_i.row(idx.representative(g))[col];
        (static_cast<std::uint64_t>(idx.count(g)) > threshold ? heavy : light).push_back(&v, one);
    }
    return {std::move(heavy), std::move(light)};
}

/**
 * The line algorithm: levels whose A_{i+1} values reach more than ⌈√OUT~⌉ A_1 values through
 * light prefixes are evaluated by Yannakakis rooted at R_1; the all-light remainder by
 * ⊕_{A_k} S_{k−1} ⋈ R_k. `inst` is indexed by edge id of q.
 */
template <Semiring S>
Relation<typename S::value_type> run_line(const Query& q, const LineShape& shape,
                                          const Instance<typename S::value_type>& inst, const S& ops,
                                          std::uint64_t out_guess, ExecContext* ctx = nullptr) {
    using W = typename S::value_type;
    const int k = static_cast<int>(shape.edges.size());
    if (k < 2) throw PreconditionError("line algorithm needs at least two relations");
    const std::uint64_t threshold = ceil_sqrt(std::max<std::uint64_t>(out_guess, 1));
    const AttrId a1 = shape.attrs.front();
    const AttrSet out = AttrSet::of(a1) | AttrSet::of(shape.attrs.back());
    const JoinTree tree = line_tree(q, shape);
    std::vector<NodeId> all(k);
    std::iota(all.begin(), all.end(), 0);

    auto rel = [&](int i) -> const Relation<W>& { return inst.relations.at(shape.edges[i]); };
    std::vector<Relation<W>> light_rels;
    std::vector<Relation<W>> parts;
    Relation<W> s_prev;
    for (int i = 0; i < k - 1; ++i) {
        const AttrId next = shape.attrs[i + 1];
        Relation<W> t_i = i == 0 ? rel(0)
                                 : join_aggregate(s_prev, rel(i), AttrSet::of(a1) | AttrSet::of(next), ops, ctx);
        auto [heavy, light] = classify_heavy(t_i, next, threshold, ops.one());
        auto r_heavy = semi_join(rel(i), heavy, ctx);
        light_rels.push_back(semi_join(rel(i), light, ctx));
        s_prev = semi_join(t_i, light, ctx);
        if (r_heavy.empty()) continue;
        std::vector<Relation<W>> nodes;
        for (int j = 0; j < i; ++j) nodes.push_back(light_rels[j]);
        nodes.push_back(std::move(r_heavy));
        for (int j = i + 1; j < k; ++j) nodes.push_back(rel(j));
        parts.push_back(yannakakis_view(tree, all, 0, std::move(nodes), out, ops, ctx));
    }
    parts.push_back(join_aggregate(s_prev, rel(k - 1), out, ops, ctx));
    return merge_results(parts, ops, ctx);
}

/// Keyed 64-bit hash of a value for KMV trial `trial`.
inline std::uint64_t kmv_hash(Value v, std::uint64_t seed) {
    return mix64(static_cast<std::uint64_t>(v) ^ mix64(seed + 0x632be59bd9b4e019ULL));
}

/**
 * KMV estimate of the output size of a line query: per A_1 value, a sketch of the k smallest
 * hashes of reachable A_{k+1} values, merged right to left; per-value estimates (exact when a
 * sketch holds fewer than k hashes, (k−1)/v_k otherwise) are summed; median over trials.
 */
template <class W>
double kmv_estimate_line(const Query& q, const Instance<W>& inst, int k, int trials, std::uint64_t seed = 1) {
    if (k < 2 || trials < 1) throw PreconditionError("KMV needs k >= 2 and at least one trial");
    const auto line = as_line_query(q);
    if (!line) throw PreconditionError("KMV estimation requires a line query");
    const LineShape& shape = *line;
    const int len = static_cast<int>(shape.edges.size());
    std::vector<double> estimates;
    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t tseed = mix64(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(trial));
        std::vector<Value> keys;
        std::vector<std::vector<std::uint64_t>> sketches;
        {
            const auto& r = inst.relations.at(shape.edges[len - 1]);
            const AttrId left = shape.attrs[len - 1], right = shape.attrs[len];
            const int lc = r.schema().rank(left), rc = r.schema().rank(right);
            KeyIndex idx(r, {lc});
            for (int g = 0; g < idx.groups(); ++g) {
                keys.push_back(r.row(idx.representative(g))[lc]);
                std::vector<std::uint64_t> sk;
                for (int row = idx.head(g); row >= 0; row = idx.next(row)) sk.push_back(kmv_hash(r.row(row)[rc], tseed));
                std::sort(sk.begin(), sk.end());
                sk.erase(std::unique(sk.begin(), sk.end()), sk.end());
                if (static_cast<int>(sk.size()) > k) sk.resize(k);
                sketches.push_back(std::move(sk));
            }
        }
        for (int i = len - 2; i >= 0; --i) {
            const auto& r = inst.relations.at(shape.edges[i]);
            const int lc = r.schema().rank(shape.attrs[i]), rc = r.schema().rank(shape.attrs[i + 1]);
            KeyIndex right_idx(keys.data(), 1, keys.size(), {0});
            const std::vector<int> probe{rc};
            KeyIndex left_idx(r, {lc});
            std::vector<Value> next_keys;
            std::vector<std::vector<std::uint64_t>> next_sketches;
            for (int g = 0; g < left_idx.groups(); ++g) {
                std::vector<std::uint64_t> sk;
                for (int row = left_idx.head(g); row >= 0; row = left_idx.next(row)) {
                    const int hit = right_idx.find(r.row(row), probe);
                    if (hit < 0) continue;
                    const auto& other = sketches[right_idx.representative(hit)];
                    std::vector<std::uint64_t> merged;
                    std::set_union(sk.begin(), sk.end(), other.begin(), other.end(), std::back_inserter(merged));
                    if (static_cast<int>(merged.size()) > k) merged.resize(k);
                    sk.swap(merged);
                }
                if (sk.empty()) continue;
                next_keys.push_back(r.row(left_idx.representative(g))[lc]);
                next_sketches.push_back(std::move(sk));
            }
            keys.swap(next_keys);
            sketches.swap(next_sketches);
        }
        double total = 0;
        for (const auto& sk : sketches) {
            if (static_cast<int>(sk.size()) < k) {
                total += static_cast<double>(sk.size());
            } else {
                const double vk = (static_cast<double>(sk[k - 1]) + 1.0) / 18446744073709551616.0;
                total += (k - 1) / vk;
            }
        }
        estimates.push_back(total);
    }
    std::nth_element(estimates.begin(), estimates.begin() + estimates.size() / 2, estimates.end());
    return estimates[estimates.size() / 2];
}

}  // namespace joinagg
