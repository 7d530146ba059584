#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "joinagg/attr_set.hpp"
#include "joinagg/query.hpp"

namespace joinagg {

using NodeId = int;

struct JoinTreeNode {
    AttrSet bag;
    /// The relation whose attribute set equals the bag, if any (lowest id among duplicates).
    std::optional<EdgeId> source;
    /// Every relation whose data is joined into this node's derived relation (source first).
    std::vector<EdgeId> hosted;
};

/// Width-1 tree decomposition. Node ids are positions in `nodes()`.
class JoinTree {
public:
    JoinTree() = default;
    explicit JoinTree(std::vector<JoinTreeNode> nodes);

    void add_edge(NodeId a, NodeId b);

    int size() const { return static_cast<int>(nodes_.size()); }
    const JoinTreeNode& node(NodeId u) const { return nodes_.at(u); }
    const std::vector<JoinTreeNode>& nodes() const { return nodes_; }
    AttrSet bag(NodeId u) const { return nodes_.at(u).bag; }
    const std::vector<NodeId>& neighbors(NodeId u) const { return adj_.at(u); }
    bool adjacent(NodeId a, NodeId b) const;
    bool is_leaf(NodeId u) const { return adj_.at(u).size() <= 1; }
    std::vector<std::pair<NodeId, NodeId>> tree_edges() const;
    std::vector<NodeId> leaves() const;

    /// Parent of each node and a pre-order listing when rooted at `root`.
    struct Rooting {
        NodeId root;
        std::vector<NodeId> parent;
        std::vector<NodeId> preorder;
        std::vector<std::vector<NodeId>> children;
    };
    Rooting rooted_at(NodeId root) const;

    std::string to_text(const Query& q, std::optional<NodeId> root = std::nullopt) const;
    std::string to_dot(const Query& q) const;

private:
    std::vector<JoinTreeNode> nodes_;
    std::vector<std::vector<NodeId>> adj_;
};

/// GYO failure: the relations left when no ear can be removed.
struct CyclicReport {
    std::vector<EdgeId> residue;
    std::string describe(const Query& q) const;
};

/// Ear removal in lowest-edge-id order over the containment-maximal relations.
std::variant<JoinTree, CyclicReport> gyo_join_tree(const Query& q);
bool is_acyclic(const Query& q);
/// gyo_join_tree or throw CyclicQueryError.
JoinTree require_join_tree(const Query& q);

/// Returns a description of the first violated property, or nothing when `t` is a valid
/// width-1 TD of `q` (running intersection, coverage, bags inside edges, distinct bags, tree).
std::optional<std::string> validate_join_tree(const Query& q, const JoinTree& t);

/**
 * Separated TD: leaves are exactly the relations carrying output attributes and
 * internal bags carry none. Node ids follow relation ids; nodes for cores not
 * contained in any relation without outputs are appended after them.
 * Requires a separated acyclic query that is ∃-connected or has a single relation.
 */
JoinTree separated_join_tree(const Query& q);

/// One side of a tree edge (u1,u2). Without a cut (u2 == -1) the view is the whole tree.
struct SubtreeView {
    NodeId u1 = -1;
    NodeId u2 = -1;
    std::vector<NodeId> nodes;
    std::vector<NodeId> leaves;
    int phi_num = 0;  // |leaves|
    int phi_den = 1;  // fn-fhtw of the query

    bool contains(NodeId u) const;
};

/// Views (u1,u2) and (u2,u1). `width` is the fn-fhtw used as the φ denominator.
std::pair<SubtreeView, SubtreeView> split(const JoinTree& t, NodeId u1, NodeId u2, int width);
SubtreeView whole_tree(const JoinTree& t, NodeId root, int width);

/// Attributes of the bags in a view.
AttrSet view_attrs(const JoinTree& t, const SubtreeView& v);
/// Output of the derived query: (y ∩ attrs(view)) ∪ (χ(u1) ∩ χ(u2)).
AttrSet view_output(const JoinTree& t, const SubtreeView& v, const Query& q);
/// The derived query over the relations hosted in the view.
Query subquery_of_subtree(const JoinTree& t, const SubtreeView& v, const Query& q);

}  // namespace joinagg
