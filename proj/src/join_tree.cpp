#include "joinagg/join_tree.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "joinagg/error.hpp"

namespace joinagg {

JoinTree::JoinTree(std::vector<JoinTreeNode> nodes) : nodes_(std::move(nodes)), adj_(nodes_.size()) {}

void JoinTree::add_edge(NodeId a, NodeId b) {
    if (a == b || adjacent(a, b)) throw InvariantViolation("invalid join tree edge");
    adj_.at(a).insert(std::upper_bound(adj_[a].begin(), adj_[a].end(), b), b);
    adj_.at(b).insert(std::upper_bound(adj_[b].begin(), adj_[b].end(), a), a);
}

bool JoinTree::adjacent(NodeId a, NodeId b) const {
    const auto& n = adj_.at(a);
    return std::binary_search(n.begin(), n.end(), b);
}

std::vector<std::pair<NodeId, NodeId>> JoinTree::tree_edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId u = 0; u < size(); ++u)
        for (NodeId v : adj_[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

std::vector<NodeId> JoinTree::leaves() const {
    std::vector<NodeId> out;
    for (NodeId u = 0; u < size(); ++u)
        if (is_leaf(u)) out.push_back(u);
    return out;
}

JoinTree::Rooting JoinTree::rooted_at(NodeId root) const {
    Rooting r{root, std::vector<NodeId>(size(), -1), {}, std::vector<std::vector<NodeId>>(size())};
    std::vector<NodeId> stack{root};
    std::vector<bool> seen(size(), false);
    seen.at(root) = true;
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        r.preorder.push_back(u);
        for (auto it = adj_[u].rbegin(); it != adj_[u].rend(); ++it) {
            if (seen[*it]) continue;
            seen[*it] = true;
            r.parent[*it] = u;
            stack.push_back(*it);
        }
        for (NodeId v : adj_[u])
            if (r.parent[v] == u) r.children[u].push_back(v);
    }
    if (static_cast<int>(r.preorder.size()) != size()) throw InvariantViolation("join tree is disconnected");
    return r;
}

namespace {

std::string node_label(const Query& q, const JoinTree& t, NodeId u) {
    const auto& n = t.node(u);
    std::string label = "u" + std::to_string(u);
    if (n.source) label += " " + q.edge(*n.source).name;
    return label + " " + q.describe_set(n.bag);
}

}  // namespace

std::string JoinTree::to_text(const Query& q, std::optional<NodeId> root) const {
    if (size() == 0) return "";
    const auto r = rooted_at(root.value_or(0));
    std::ostringstream os;
    std::function<void(NodeId, int)> emit = [&](NodeId u, int depth) {
        os << std::string(2 * depth, ' ') << node_label(q, *this, u) << "\n";
        for (NodeId c : r.children[u]) emit(c, depth + 1);
    };
    emit(r.root, 0);
    return os.str();
}

std::string JoinTree::to_dot(const Query& q) const {
    std::ostringstream os;
    os << "graph jointree {\n";
    for (NodeId u = 0; u < size(); ++u) os << "  u" << u << " [label=\"" << node_label(q, *this, u) << "\"];\n";
    for (auto [a, b] : tree_edges()) os << "  u" << a << " -- u" << b << ";\n";
    os << "}\n";
    return os.str();
}

std::string CyclicReport::describe(const Query& q) const {
    std::string out = "cyclic query; irreducible relations:";
    for (EdgeId e : residue) out += " " + q.edge(e).name + q.describe_set(q.edge(e).attrs);
    return out;
}

namespace {

/// GYO over bags; returns the tree edges, or the surviving bag indices when stuck.
std::variant<std::vector<std::pair<int, int>>, std::vector<int>> gyo(const std::vector<AttrSet>& bags) {
    std::vector<int> alive(bags.size());
    for (std::size_t i = 0; i < bags.size(); ++i) alive[i] = static_cast<int>(i);
    std::vector<std::pair<int, int>> edges;
    while (alive.size() > 1) {
        bool removed = false;
        for (std::size_t p = 0; p < alive.size() && !removed; ++p) {
            const int e = alive[p];
            AttrSet others;
            for (int o : alive)
                if (o != e) others |= bags[o];
            const AttrSet shared = bags[e] & others;
            for (int o : alive) {
                if (o != e && shared.subset_of(bags[o])) {
                    edges.emplace_back(e, o);
                    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(p));
                    removed = true;
                    break;
                }
            }
        }
        if (!removed) return alive;
    }
    return edges;
}

NodeId lowest_covering_node(const std::vector<JoinTreeNode>& nodes, AttrSet s) {
    for (NodeId u = 0; u < static_cast<NodeId>(nodes.size()); ++u)
        if (s.subset_of(nodes[u].bag)) return u;
    return -1;
}

}  // namespace

std::variant<JoinTree, CyclicReport> gyo_join_tree(const Query& q) {
    std::vector<JoinTreeNode> nodes;
    std::vector<EdgeId> hosted_later;
    for (EdgeId i = 0; i < q.edge_count(); ++i) {
        const AttrSet a = q.edge(i).attrs;
        bool maximal = true;
        for (EdgeId j = 0; j < q.edge_count() && maximal; ++j) {
            if (i == j) continue;
            const AttrSet b = q.edge(j).attrs;
            if (a.subset_of(b) && (a != b || j < i)) maximal = false;
        }
        if (maximal)
            nodes.push_back({a, i, {i}});
        else
            hosted_later.push_back(i);
    }
    for (EdgeId i : hosted_later) nodes[lowest_covering_node(nodes, q.edge(i).attrs)].hosted.push_back(i);

    std::vector<AttrSet> bags;
    for (const auto& n : nodes) bags.push_back(n.bag);
    auto res = gyo(bags);
    if (auto* stuck = std::get_if<std::vector<int>>(&res)) {
        CyclicReport report;
        for (int u : *stuck) report.residue.push_back(*nodes[u].source);
        return report;
    }
    JoinTree t(std::move(nodes));
    for (auto [a, b] : std::get<0>(res)) t.add_edge(a, b);
    return t;
}

bool is_acyclic(const Query& q) { return std::holds_alternative<JoinTree>(gyo_join_tree(q)); }

JoinTree require_join_tree(const Query& q) {
    auto res = gyo_join_tree(q);
    if (auto* r = std::get_if<CyclicReport>(&res)) throw CyclicQueryError(r->describe(q));
    return std::get<JoinTree>(std::move(res));
}

std::optional<std::string> validate_join_tree(const Query& q, const JoinTree& t) {
    const int n = t.size();
    if (n == 0) return q.edge_count() == 0 ? std::nullopt : std::optional<std::string>("empty tree");
    if (static_cast<int>(t.tree_edges().size()) != n - 1) return "not a tree: wrong edge count";
    try {
        t.rooted_at(0);
    } catch (const InvariantViolation&) {
        return "not a tree: disconnected";
    }
    for (const auto& e : q.edges()) {
        bool covered = false;
        for (NodeId u = 0; u < n && !covered; ++u) covered = e.attrs.subset_of(t.bag(u));
        if (!covered) return "relation " + e.name + " is not covered by any bag";
    }
    for (NodeId u = 0; u < n; ++u) {
        bool inside = false;
        for (const auto& e : q.edges()) inside = inside || t.bag(u).subset_of(e.attrs);
        if (!inside) return "bag of u" + std::to_string(u) + " is not inside any relation";
        for (NodeId v = 0; v < u; ++v)
            if (t.bag(u) == t.bag(v)) return "duplicate bags";
        for (EdgeId h : t.node(u).hosted)
            if (!q.edge(h).attrs.subset_of(t.bag(u))) return "hosted relation outside its bag";
    }
    for (AttrId a : q.attrs()) {
        std::vector<NodeId> holders;
        for (NodeId u = 0; u < n; ++u)
            if (t.bag(u).contains(a)) holders.push_back(u);
        std::vector<bool> seen(n, false);
        std::vector<NodeId> stack{holders.front()};
        seen[holders.front()] = true;
        int reached = 0;
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            ++reached;
            for (NodeId v : t.neighbors(u))
                if (!seen[v] && t.bag(v).contains(a)) {
                    seen[v] = true;
                    stack.push_back(v);
                }
        }
        if (reached != static_cast<int>(holders.size()))
            return "running intersection fails for attribute " + q.name(a);
    }
    return std::nullopt;
}

JoinTree separated_join_tree(const Query& q) {
    if (q.edge_count() == 0) throw PreconditionError("separated join tree needs at least one relation");
    if (q.edge_count() == 1) {
        JoinTree t({{q.edge(0).attrs, 0, {0}}});
        return t;
    }
    if (!is_acyclic(q)) throw PreconditionError("separated join tree requires an acyclic query");
    if (!is_separated(q)) throw PreconditionError("separated join tree requires a separated query");
    if (exists_connected_components(q).size() != 1)
        throw PreconditionError("separated join tree requires an exists-connected query");

    const AttrSet y = q.output();
    const int m = q.edge_count();
    std::vector<bool> is_output(m);
    for (EdgeId i = 0; i < m; ++i) {
        is_output[i] = q.edge(i).attrs.intersects(y);
        if (is_output[i] && (q.edge(i).attrs - y).empty())
            throw PreconditionError("relation " + q.edge(i).name + " has only output attributes");
    }

    // Inner candidates: relations without outputs, then cores of output relations that no
    // such relation contains. Only containment-maximal, first-seen candidates are kept.
    struct Candidate {
        AttrSet bag;
        std::optional<EdgeId> source;
    };
    std::vector<Candidate> cand;
    for (EdgeId i = 0; i < m; ++i)
        if (!is_output[i]) cand.push_back({q.edge(i).attrs, i});
    for (EdgeId i = 0; i < m; ++i) {
        if (!is_output[i]) continue;
        const AttrSet core = q.edge(i).attrs - y;
        bool inside = false;
        for (EdgeId j = 0; j < m && !inside; ++j) inside = !is_output[j] && core.subset_of(q.edge(j).attrs);
        if (!inside) cand.push_back({core, std::nullopt});
    }
    std::vector<bool> keep(cand.size(), true);
    for (std::size_t i = 0; i < cand.size(); ++i)
        for (std::size_t j = 0; j < cand.size() && keep[i]; ++j)
            if (i != j && cand[i].bag.subset_of(cand[j].bag) && (cand[i].bag != cand[j].bag || j < i)) keep[i] = false;

    // Node ids: kept or leaf relations in relation-id order, synthetic cores last.
    std::vector<JoinTreeNode> nodes;
    std::vector<NodeId> node_of_edge(m, -1);
    std::vector<bool> inner;
    std::vector<EdgeId> hosted_later;
    for (EdgeId i = 0; i < m; ++i) {
        bool kept_inner = false;
        for (std::size_t c = 0; c < cand.size(); ++c)
            kept_inner = kept_inner || (keep[c] && cand[c].source == i);
        if (is_output[i] || kept_inner) {
            node_of_edge[i] = static_cast<NodeId>(nodes.size());
            nodes.push_back({q.edge(i).attrs, i, {i}});
            inner.push_back(!is_output[i]);
        } else {
            hosted_later.push_back(i);
        }
    }
    for (std::size_t c = 0; c < cand.size(); ++c)
        if (keep[c] && !cand[c].source) {
            nodes.push_back({cand[c].bag, std::nullopt, {}});
            inner.push_back(true);
        }

    std::vector<NodeId> inner_ids;
    std::vector<AttrSet> inner_bags;
    for (NodeId u = 0; u < static_cast<NodeId>(nodes.size()); ++u)
        if (inner[u]) {
            inner_ids.push_back(u);
            inner_bags.push_back(nodes[u].bag);
        }
    auto res = gyo(inner_bags);
    if (std::holds_alternative<std::vector<int>>(res))
        throw PreconditionError("the non-output part of the query is cyclic");

    std::vector<std::vector<NodeId>> adj(nodes.size());
    auto link = [&](NodeId a, NodeId b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (auto [a, b] : std::get<0>(res)) link(inner_ids[a], inner_ids[b]);
    for (EdgeId i = 0; i < m; ++i) {
        if (!is_output[i]) continue;
        const AttrSet core = q.edge(i).attrs - y;
        NodeId host = -1;
        for (NodeId u : inner_ids)
            if (core.subset_of(nodes[u].bag)) {
                host = u;
                break;
            }
        if (host < 0) throw InvariantViolation("no inner bag hosts the core of " + q.edge(i).name);
        link(node_of_edge[i], host);
    }

    // A synthetic bag between exactly two neighbours that both contain it is redundant.
    std::vector<bool> dropped(nodes.size(), false);
    for (NodeId u = 0; u < static_cast<NodeId>(nodes.size()); ++u) {
        if (nodes[u].source || adj[u].size() != 2) continue;
        const NodeId a = adj[u][0], b = adj[u][1];
        if (!nodes[u].bag.subset_of(nodes[a].bag) || !nodes[u].bag.subset_of(nodes[b].bag)) continue;
        dropped[u] = true;
        std::erase(adj[a], u);
        std::erase(adj[b], u);
        link(a, b);
        adj[u].clear();
    }

    std::vector<NodeId> renumber(nodes.size(), -1);
    std::vector<JoinTreeNode> final_nodes;
    for (NodeId u = 0; u < static_cast<NodeId>(nodes.size()); ++u)
        if (!dropped[u]) {
            renumber[u] = static_cast<NodeId>(final_nodes.size());
            final_nodes.push_back(nodes[u]);
        }
    for (EdgeId i : hosted_later) final_nodes[lowest_covering_node(final_nodes, q.edge(i).attrs)].hosted.push_back(i);
    JoinTree t(std::move(final_nodes));
    for (NodeId u = 0; u < static_cast<NodeId>(nodes.size()); ++u)
        for (NodeId v : adj[u])
            if (u < v && !dropped[u] && !dropped[v]) t.add_edge(renumber[u], renumber[v]);

    for (NodeId u = 0; u < t.size(); ++u) {
        const bool carries_output = t.bag(u).intersects(y);
        if (carries_output != t.is_leaf(u))
            throw InvariantViolation("separated join tree leaves do not match the output relations");
    }
    if (auto err = validate_join_tree(q, t)) throw InvariantViolation("separated join tree: " + *err);
    return t;
}

bool SubtreeView::contains(NodeId u) const { return std::binary_search(nodes.begin(), nodes.end(), u); }

namespace {

SubtreeView make_view(const JoinTree& t, NodeId u1, NodeId u2, int width) {
    SubtreeView v;
    v.u1 = u1;
    v.u2 = u2;
    std::vector<bool> seen(t.size(), false);
    std::vector<NodeId> stack{u1};
    seen[u1] = true;
    if (u2 >= 0) seen[u2] = true;
    while (!stack.empty()) {
        NodeId u = stack.back();
        stack.pop_back();
        v.nodes.push_back(u);
        for (NodeId w : t.neighbors(u))
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
    }
    std::sort(v.nodes.begin(), v.nodes.end());
    for (NodeId u : v.nodes)
        if (t.is_leaf(u)) v.leaves.push_back(u);
    v.phi_num = static_cast<int>(v.leaves.size());
    v.phi_den = width;
    return v;
}

}  // namespace

std::pair<SubtreeView, SubtreeView> split(const JoinTree& t, NodeId u1, NodeId u2, int width) {
    if (u1 < 0 || u2 < 0 || u1 >= t.size() || u2 >= t.size() || !t.adjacent(u1, u2))
        throw PreconditionError("split requires a tree edge");
    return {make_view(t, u1, u2, width), make_view(t, u2, u1, width)};
}

SubtreeView whole_tree(const JoinTree& t, NodeId root, int width) { return make_view(t, root, -1, width); }

AttrSet view_attrs(const JoinTree& t, const SubtreeView& v) {
    AttrSet s;
    for (NodeId u : v.nodes) s |= t.bag(u);
    return s;
}

AttrSet view_output(const JoinTree& t, const SubtreeView& v, const Query& q) {
    AttrSet out = q.output() & view_attrs(t, v);
    if (v.u2 >= 0) out |= t.bag(v.u1) & t.bag(v.u2);
    return out;
}

Query subquery_of_subtree(const JoinTree& t, const SubtreeView& v, const Query& q) {
    std::vector<Hyperedge> edges;
    for (NodeId u : v.nodes) {
        const auto& n = t.node(u);
        edges.push_back({n.source ? q.edge(*n.source).name : "__u" + std::to_string(u), n.bag});
    }
    return Query::from_parts(q.names(), std::move(edges), view_output(t, v, q));
}

}  // namespace joinagg
