#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

#include "joinagg/instance.hpp"

namespace joinagg {

inline constexpr double kBruteForceGuard = 1e7;

/// Upper bound on the full join size: product of relation sizes over a greedy edge cover.
template <class W>
double join_size_bound(const Query& q, const Instance<W>& inst) {
    AttrSet uncovered = q.attrs();
    double bound = 1;
    while (!uncovered.empty()) {
        EdgeId best = -1;
        int gain = 0;
        for (EdgeId e = 0; e < q.edge_count(); ++e) {
            const int g = (q.edge(e).attrs & uncovered).size();
            if (g > gain) {
                gain = g;
                best = e;
            }
        }
        bound *= static_cast<double>(inst.relations[best].size());
        uncovered -= q.edge(best).attrs;
    }
    return bound;
}

/**
 * Enumerates the full join by backtracking over relations in id order. The callback
 * receives the chosen row of each relation and the values of all attributes (indexed
 * by attribute id). Throws PreconditionError when both size bounds exceed `guard`.
 */
template <class W>
void enumerate_full_join(const Query& q, const Instance<W>& inst,
                         const std::function<void(const std::vector<int>&, const std::vector<Value>&)>& visit,
                         double guard = kBruteForceGuard) {
    check_instance(q, inst);
    const int m = q.edge_count();
    std::vector<KeyIndex> indexes;
    std::vector<std::vector<int>> probe_pos(m);  // attribute ids bound before edge i
    std::vector<std::vector<int>> free_cols(m);  // (column, attribute) pairs newly bound by edge i
    std::vector<std::vector<AttrId>> free_attr(m);
    AttrSet bound;
    for (EdgeId e = 0; e < m; ++e) {
        const AttrSet a = q.edge(e).attrs;
        const AttrSet shared = a & bound;
        for (AttrId x : shared) probe_pos[e].push_back(x);
        for (AttrId x : a - bound) {
            free_cols[e].push_back(a.rank(x));
            free_attr[e].push_back(x);
        }
        indexes.emplace_back(inst.relations[e], column_positions(a, shared));
        bound |= a;
    }
    // Enumeration extends each partial result by at most the largest key group.
    double chain = 1;
    for (EdgeId e = 0; e < m; ++e) {
        int widest = 0;
        for (int g = 0; g < indexes[e].groups(); ++g) widest = std::max(widest, indexes[e].count(g));
        chain *= widest;
    }
    if (std::min(chain, join_size_bound(q, inst)) > guard) throw PreconditionError("full join too large for brute force");
    std::vector<Value> values(kMaxAttributes, 0);
    std::vector<int> chosen(m, -1);
    std::function<void(int)> rec = [&](int e) {
        if (e == m) {
            visit(chosen, values);
            return;
        }
        const int g = indexes[e].find(values.data(), probe_pos[e]);
        if (g < 0) return;
        const auto& rel = inst.relations[e];
        for (int r = indexes[e].head(g); r >= 0; r = indexes[e].next(r)) {
            const Value* row = rel.row(r);
            for (std::size_t i = 0; i < free_cols[e].size(); ++i) values[free_attr[e][i]] = row[free_cols[e][i]];
            chosen[e] = r;
            rec(e + 1);
        }
    };
    if (m > 0) rec(0);
}

/// Reference evaluation: full join, ⊗ along each result, ⊕ per output tuple.
template <Semiring S>
Relation<typename S::value_type> brute_force(const Query& q, const Instance<typename S::value_type>& inst, const S& ops,
                                             double guard = kBruteForceGuard) {
    using W = typename S::value_type;
    const auto out_attrs = q.output().ids();
    std::map<std::vector<Value>, W> groups;
    enumerate_full_join<W>(
        q, inst,
        [&](const std::vector<int>& rows, const std::vector<Value>& values) {
            W w = ops.one();
            for (std::size_t e = 0; e < rows.size(); ++e) w = ops.times(w, inst.relations[e].weight(rows[e]));
            std::vector<Value> key;
            key.reserve(out_attrs.size());
            for (AttrId a : out_attrs) key.push_back(values[a]);
            auto it = groups.find(key);
            if (it == groups.end())
                groups.emplace(std::move(key), std::move(w));
            else
                it->second = ops.plus(it->second, w);
        },
        guard);
    Relation<W> out(q.output());
    out.reserve(groups.size());
    for (auto& [key, w] : groups) out.push_back(key.data(), w);
    return out;
}

}  // namespace joinagg
