#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "joinagg/yannakakis.hpp"

namespace joinagg {

enum class EdgeLabel { Unlabeled, Small, Large, Limited };

std::string label_name(EdgeLabel l);

/// One label per directed tree edge (u1,u2).
class EdgeLabels {
public:
    EdgeLabels() = default;
    explicit EdgeLabels(int nodes) : n_(nodes), labels_(static_cast<std::size_t>(nodes) * nodes, EdgeLabel::Unlabeled) {}

    EdgeLabel get(NodeId u1, NodeId u2) const { return labels_.at(static_cast<std::size_t>(u1) * n_ + u2); }
    void set(NodeId u1, NodeId u2, EdgeLabel l) { labels_.at(static_cast<std::size_t>(u1) * n_ + u2) = l; }
    /// Small or Limited (a limited edge is small).
    bool small(NodeId u1, NodeId u2) const {
        const auto l = get(u1, u2);
        return l == EdgeLabel::Small || l == EdgeLabel::Limited;
    }
    int nodes() const { return n_; }

private:
    int n_ = 0;
    std::vector<EdgeLabel> labels_;
};

/// ⌊out_guess^(num/den)⌋, exact.
std::uint64_t hybrid_threshold(std::uint64_t out_guess, int num, int den);

/**
 * Limited-imply-limited to a fixpoint: an unlabeled (u1,u2) becomes Limited when every
 * (u3,u1), u3 ∈ N(u1)−{u2}, is Limited. Leaves are skipped (the vacuous case is left to
 * partitioning). Returns the newly labeled edges in order.
 */
std::vector<std::pair<NodeId, NodeId>> saturate_limited(const JoinTree& t, EdgeLabels& labels);

/// After (u1,u2) is labeled Large, (u2,u1) becomes Limited. Returns whether it changed.
bool large_reverse(EdgeLabels& labels, NodeId u1, NodeId u2);

/// Lowest leaf whose incoming edge is Small or Limited.
std::optional<NodeId> check_optimal(const JoinTree& t, const EdgeLabels& labels);

/**
 * Unlabeled (u1,u2) whose other incoming edges at u1 are all small; the one with the
 * fewest nodes on the u1 side, then lowest (u1,u2).
 */
std::optional<std::pair<NodeId, NodeId>> choose_partition_edge(const JoinTree& t, const EdgeLabels& labels);

/**
 * Leaf satisfying the optimal condition on a tree where no more labels can be inferred or
 * assigned: prunes subtrees hanging off a Large edge with all-small interiors until some
 * output leaf has every edge directed towards it small. Throws PreconditionError otherwise.
 */
NodeId identify_leaf(const JoinTree& t, const EdgeLabels& labels);

/// A sub-instance in the worklist: labels plus one derived relation per tree node.
template <class W>
struct PartitionTask {
    int id = 0;
    int parent = -1;
    EdgeLabels labels;
    std::vector<Relation<W>> rels;
};

/// Hooks for auditing a run; all default to no-ops.
template <class W>
struct HybridObserver {
    virtual ~HybridObserver() = default;
    /// The separated tree and the query with one relation per node that tasks instantiate.
    virtual void on_start(const JoinTree&, const Query& /*node_query*/, int /*width*/) {}
    /// Called with both children before they are reduced or dropped.
    virtual void on_split(const PartitionTask<W>& /*parent*/, const PartitionTask<W>& /*heavy*/,
                          const PartitionTask<W>& /*light*/, NodeId, NodeId) {}
    virtual void on_label(const PartitionTask<W>&, NodeId, NodeId, EdgeLabel) {}
    virtual void on_finalize(const PartitionTask<W>&, NodeId /*root*/, const Relation<W>&) {}
};

struct HybridReport {
    int width = 0;
    int tree_nodes = 0;
    int iterations = 0;
    int splits = 0;
    int finalized = 0;
    int empty_tasks = 0;
    int fallbacks = 0;
    std::vector<std::string> trace;
};

namespace detail {

inline std::string node_name(const Query& node_query, NodeId u) { return node_query.edge(u).name; }

inline std::string edge_text(const Query& node_query, NodeId u1, NodeId u2) {
    return "(" + node_name(node_query, u1) + "," + node_name(node_query, u2) + ")";
}

template <class W>
bool any_empty(const std::vector<Relation<W>>& rels) {
    for (const auto& r : rels)
        if (r.empty()) return true;
    return false;
}

}  // namespace detail

/**
 * Output-optimal evaluation of a separated acyclic query. The instance is split into
 * labeled sub-instances until each meets the optimal condition, and each of those is
 * evaluated by Yannakakis rooted at the qualifying leaf. Results are ⊕-merged.
 * Exact for any out_guess; the guess only affects routing and cost.
 */
template <Semiring S>
Relation<typename S::value_type> hybrid_yannakakis(const Query& q, const Instance<typename S::value_type>& inst,
                                                   const S& ops, std::uint64_t out_guess, ExecContext* ctx = nullptr,
                                                   HybridReport* report = nullptr,
                                                   HybridObserver<typename S::value_type>* observer = nullptr) {
    using W = typename S::value_type;
    check_instance(q, inst);
    if (!is_separated(q)) throw PreconditionError("hybrid evaluation requires a separated query");
    const JoinTree t = separated_join_tree(q);
    const int width = std::max<int>(1, static_cast<int>(t.leaves().size()));
    const Query node_query = subquery_of_subtree(t, whole_tree(t, 0, width), q);
    const AttrSet y = q.output();
    HybridReport local;
    HybridReport& rep = report ? *report : local;
    rep = HybridReport{};
    rep.width = width;
    rep.tree_nodes = t.size();
    if (observer) observer->on_start(t, node_query, width);
    auto note = [&](std::string line) { rep.trace.push_back(std::move(line)); };

    std::vector<NodeId> all(t.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<Relation<W>> parts;
    auto finalize = [&](const PartitionTask<W>& task, NodeId root) {
        auto r = yannakakis_view(t, all, root, task.rels, y, ops, ctx);
        if (observer) observer->on_finalize(task, root, r);
        ++rep.finalized;
        parts.push_back(std::move(r));
    };

    PartitionTask<W> root_task{0, -1, EdgeLabels(t.size()), derived_relations(q, t, inst, ops, ctx)};
    reduce_nodes(t, root_task.rels, ctx);
    int next_id = 1;
    if (detail::any_empty(root_task.rels)) {
        ++rep.empty_tasks;
        note("drop t0 empty");
    } else if (t.size() == 1) {
        note("finalize t0 at " + detail::node_name(node_query, 0));
        finalize(root_task, 0);
    } else {
        const int directed = 2 * (t.size() - 1);
        const std::uint64_t cap = directed >= 62 ? ~0ULL : (1ULL << directed) + 1;
        std::vector<PartitionTask<W>> work;
        work.push_back(std::move(root_task));
        while (!work.empty()) {
            if (static_cast<std::uint64_t>(++rep.iterations) > cap)
                throw InvariantViolation("partition worklist exceeded its iteration bound");
            PartitionTask<W> task = std::move(work.back());
            work.pop_back();
            const std::string tname = "t" + std::to_string(task.id);

            for (auto [a, b] : saturate_limited(t, task.labels)) {
                note("label " + tname + " " + detail::edge_text(node_query, a, b) + " limited [saturate]");
                if (observer) observer->on_label(task, a, b, EdgeLabel::Limited);
            }
            if (auto leaf = check_optimal(t, task.labels)) {
                note("finalize " + tname + " at " + detail::node_name(node_query, *leaf));
                finalize(task, *leaf);
                continue;
            }
            const auto chosen = choose_partition_edge(t, task.labels);
            if (!chosen) {
                const NodeId leaf = t.leaves().front();
                ++rep.fallbacks;
                note("fallback " + tname + " at " + detail::node_name(node_query, leaf));
                finalize(task, leaf);
                continue;
            }
            const auto [u1, u2] = *chosen;
            const SubtreeView view = split(t, u1, u2, width).first;
            const auto sub = yannakakis_subquery(q, t, view, task.rels, ops, ctx);
            const AttrSet key = t.bag(u1) & t.bag(u2);
            const std::uint64_t threshold = hybrid_threshold(out_guess, view.phi_num, width);
            Relation<W> heavy_keys(key);
            {
                KeyIndex idx(sub, column_positions(sub.schema(), key));
                const auto key_pos = column_positions(sub.schema(), key);
                std::vector<Value> buf(key.size());
                for (int g = 0; g < idx.groups(); ++g) {
                    if (static_cast<std::uint64_t>(idx.count(g)) <= threshold) continue;
                    const Value* row = sub.row(idx.representative(g));
                    for (std::size_t i = 0; i < key_pos.size(); ++i) buf[i] = row[key_pos[i]];
                    heavy_keys.push_back(buf.data(), ops.one());
                }
            }
            ++rep.splits;
            PartitionTask<W> heavy{next_id++, task.id, task.labels, task.rels};
            PartitionTask<W> light{next_id++, task.id, task.labels, task.rels};
            heavy.rels[u1] = semi_join(task.rels[u1], heavy_keys, ctx);
            light.rels[u1] = anti_semi_join(task.rels[u1], heavy_keys, ctx);
            heavy.labels.set(u1, u2, EdgeLabel::Large);
            const bool reversed = large_reverse(heavy.labels, u1, u2);
            light.labels.set(u1, u2, EdgeLabel::Small);
            note("split " + tname + " " + detail::edge_text(node_query, u1, u2) + " threshold=" +
                 std::to_string(threshold) + " heavy=" + std::to_string(heavy_keys.size()) + " -> t" +
                 std::to_string(heavy.id) + " large, t" + std::to_string(light.id) + " small");
            if (observer) observer->on_split(task, heavy, light, u1, u2);

            auto admit = [&](PartitionTask<W>& child, EdgeLabel l) {
                const std::string cname = "t" + std::to_string(child.id);
                reduce_nodes(t, child.rels, ctx);
                if (detail::any_empty(child.rels)) {
                    ++rep.empty_tasks;
                    note("drop " + cname + " empty");
                    return false;
                }
                if (observer) {
                    observer->on_label(child, u1, u2, l);
                    if (l == EdgeLabel::Large && reversed) observer->on_label(child, u2, u1, EdgeLabel::Limited);
                }
                if (l == EdgeLabel::Large && reversed)
                    note("label " + cname + " " + detail::edge_text(node_query, u2, u1) + " limited [reverse]");
                return true;
            };
            const bool keep_light = admit(light, EdgeLabel::Small);
            const bool keep_heavy = admit(heavy, EdgeLabel::Large);
            if (keep_light) work.push_back(std::move(light));
            if (keep_heavy) work.push_back(std::move(heavy));
        }
    }
    if (parts.empty()) return Relation<W>(y);
    if (parts.size() == 1) return std::move(parts.front());
    return merge_results(parts, ops, ctx);
}

}  // namespace joinagg
