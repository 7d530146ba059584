#pragma once

#include <numeric>
#include <vector>

#include "joinagg/instance.hpp"

namespace joinagg {

/**
 * Yannakakis over the view `nodes` of t rooted at `root`, given one relation per node
 * (indexed by node id; only view nodes are read). Semi-join passes first, then a
 * bottom-up pass where each node keeps its join attributes with the parent plus the
 * attributes of `output` seen so far. Returns a relation over output ∩ attrs(view).
 */
template <Semiring S>
Relation<typename S::value_type> yannakakis_view(const JoinTree& t, const std::vector<NodeId>& nodes, NodeId root,
                                                 std::vector<Relation<typename S::value_type>> rels, AttrSet output,
                                                 const S& ops, ExecContext* ctx = nullptr) {
    const ViewRooting rooting = root_view(t, nodes, root);
    reduce_view(rooting, rels, ctx);
    for (auto it = rooting.preorder.rbegin(); it != rooting.preorder.rend(); ++it) {
        const NodeId u = *it;
        const NodeId p = rooting.parent[u];
        const AttrSet link = p >= 0 ? t.bag(u) & t.bag(p) : AttrSet{};
        auto r = std::move(rels[u]);
        const auto& kids = rooting.children[u];
        for (std::size_t i = 0; i < kids.size(); ++i) {
            const auto& msg = rels[kids[i]];
            const AttrSet joined = r.schema() | msg.schema();
            AttrSet later;
            for (std::size_t j = i + 1; j < kids.size(); ++j) later |= rels[kids[j]].schema();
            const AttrSet keep = (link | output | later) & joined;
            r = join_aggregate(r, msg, keep, ops, ctx);
            rels[kids[i]] = {};
        }
        if (kids.empty()) {
            r = project_aggregate(r, link | (output & r.schema()), ops, ctx);
        }
        rels[u] = std::move(r);
    }
    return std::move(rels[root]);
}

/// Classic Yannakakis on the whole tree; relations are derived from the instance first.
template <Semiring S>
Relation<typename S::value_type> yannakakis(const Query& q, const JoinTree& t, NodeId root,
                                            const Instance<typename S::value_type>& inst, const S& ops,
                                            ExecContext* ctx = nullptr) {
    check_instance(q, inst);
    if (auto err = validate_join_tree(q, t)) throw PreconditionError("malformed join tree: " + *err);
    std::vector<NodeId> all(t.size());
    std::iota(all.begin(), all.end(), 0);
    return yannakakis_view(t, all, root, derived_relations(q, t, inst, ops, ctx), q.output(), ops, ctx);
}

/// 𝒬_{u1,u2}: Yannakakis on the view rooted at u1, keeping its outputs and the cut attributes.
template <Semiring S>
Relation<typename S::value_type> yannakakis_subquery(const Query& q, const JoinTree& t, const SubtreeView& view,
                                                     const std::vector<Relation<typename S::value_type>>& rels,
                                                     const S& ops, ExecContext* ctx = nullptr) {
    std::vector<Relation<typename S::value_type>> local(t.size());
    for (NodeId u : view.nodes) local[u] = rels.at(u);
    return yannakakis_view(t, view.nodes, view.u1, std::move(local), view_output(t, view, q), ops, ctx);
}

}  // namespace joinagg
