#pragma once

#include <numeric>
#include <vector>

#include "joinagg/join_tree.hpp"
#include "joinagg/query.hpp"
#include "joinagg/relation.hpp"

namespace joinagg {

/// One relation per query edge, indexed by edge id.
template <class W>
struct Instance {
    std::vector<Relation<W>> relations;

    std::size_t input_size() const {
        std::size_t n = 0;
        for (const auto& r : relations) n += r.size();
        return n;
    }
};

template <class W>
void check_instance(const Query& q, const Instance<W>& inst) {
    if (static_cast<int>(inst.relations.size()) != q.edge_count())
        throw SchemaError("instance has " + std::to_string(inst.relations.size()) + " relations, query has " +
                          std::to_string(q.edge_count()));
    for (EdgeId e = 0; e < q.edge_count(); ++e)
        if (inst.relations[e].schema() != q.edge(e).attrs)
            throw SchemaError("relation " + q.edge(e).name + " does not match its schema");
}

/// A rooted traversal of a subset of tree nodes (a connected view).
struct ViewRooting {
    NodeId root = -1;
    std::vector<NodeId> preorder;
    std::vector<NodeId> parent;                 // indexed by node id, -1 outside or at root
    std::vector<std::vector<NodeId>> children;  // indexed by node id, ascending
};

inline ViewRooting root_view(const JoinTree& t, const std::vector<NodeId>& nodes, NodeId root) {
    std::vector<bool> member(t.size(), false);
    for (NodeId u : nodes) member[u] = true;
    if (!member.at(root)) throw PreconditionError("root outside the view");
    ViewRooting r{root, {}, std::vector<NodeId>(t.size(), -1), std::vector<std::vector<NodeId>>(t.size())};
    std::vector<bool> seen(t.size(), false);
    std::vector<NodeId> stack{root};
    seen[root] = true;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        r.preorder.push_back(u);
        const auto& nb = t.neighbors(u);
        for (auto it = nb.rbegin(); it != nb.rend(); ++it) {
            if (!member[*it] || seen[*it]) continue;
            seen[*it] = true;
            r.parent[*it] = u;
            stack.push_back(*it);
        }
        for (NodeId v : nb)
            if (member[v] && r.parent[v] == u) r.children[u].push_back(v);
    }
    if (r.preorder.size() != nodes.size()) throw PreconditionError("view is not connected");
    return r;
}

/**
 * R_u: the join of the relations hosted at u. A node without a source relation starts from
 * the join of the projections π_{e∩χ(u)} R_e over all relations meeting the bag, annotated one.
 */
template <Semiring S>
Relation<typename S::value_type> derived_relation(const Query& q, const JoinTree& t,
                                                  const Instance<typename S::value_type>& inst, NodeId u, const S& ops,
                                                  ExecContext* ctx = nullptr) {
    const auto& node = t.node(u);
    Relation<typename S::value_type> r;
    std::size_t first_hosted = 0;
    if (node.source) {
        r = inst.relations.at(*node.source);
        first_hosted = 1;
    } else {
        EdgeId base = -1;
        for (EdgeId e = 0; e < q.edge_count() && base < 0; ++e)
            if (node.bag.subset_of(q.edge(e).attrs)) base = e;
        if (base < 0) throw PreconditionError("bag is not contained in any relation");
        r = project_keys(inst.relations[base], node.bag, ops.one());
        for (EdgeId e = 0; e < q.edge_count(); ++e)
            if (e != base && q.edge(e).attrs.intersects(node.bag)) r = semi_join(r, inst.relations[e]);
    }
    for (std::size_t i = first_hosted; i < node.hosted.size(); ++i) r = join(r, inst.relations.at(node.hosted[i]), ops);
    detail::materialize(ctx, r.size());
    return r;
}

template <Semiring S>
std::vector<Relation<typename S::value_type>> derived_relations(const Query& q, const JoinTree& t,
                                                                const Instance<typename S::value_type>& inst,
                                                                const S& ops, ExecContext* ctx = nullptr) {
    std::vector<Relation<typename S::value_type>> out;
    out.reserve(t.size());
    for (NodeId u = 0; u < t.size(); ++u) out.push_back(derived_relation(q, t, inst, u, ops, ctx));
    return out;
}

/// Bottom-up then top-down semi-join passes over the view rooted at `rooting.root`.
template <class W>
void reduce_view(const ViewRooting& rooting, std::vector<Relation<W>>& rels, ExecContext* ctx = nullptr) {
    for (auto it = rooting.preorder.rbegin(); it != rooting.preorder.rend(); ++it) {
        const NodeId p = rooting.parent[*it];
        if (p >= 0) rels[p] = semi_join(rels[p], rels[*it], ctx);
    }
    for (NodeId u : rooting.preorder)
        for (NodeId c : rooting.children[u]) rels[c] = semi_join(rels[c], rels[u], ctx);
}

template <class W>
void reduce_nodes(const JoinTree& t, std::vector<Relation<W>>& rels, ExecContext* ctx = nullptr) {
    if (t.size() == 0) return;
    std::vector<NodeId> all(t.size());
    std::iota(all.begin(), all.end(), 0);
    reduce_view(root_view(t, all, 0), rels, ctx);
}

/// Removes dangling tuples from every relation of the instance.
template <Semiring S>
Instance<typename S::value_type> full_reducer(const Query& q, const JoinTree& t,
                                              const Instance<typename S::value_type>& inst, const S& ops,
                                              ExecContext* ctx = nullptr) {
    check_instance(q, inst);
    auto nodes = derived_relations(q, t, inst, ops, ctx);
    reduce_nodes(t, nodes, ctx);
    Instance<typename S::value_type> out;
    out.relations.resize(q.edge_count());
    for (NodeId u = 0; u < t.size(); ++u)
        for (EdgeId e : t.node(u).hosted) out.relations[e] = semi_join(inst.relations[e], nodes[u], ctx);
    return out;
}

}  // namespace joinagg
