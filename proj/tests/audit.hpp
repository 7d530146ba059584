#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "joinagg/generators.hpp"
#include "joinagg/hybrid.hpp"
#include "joinagg/oracle.hpp"
#include "joinagg/rewrite.hpp"

namespace fixtures {

/**
 * Checks a hybrid run against the oracle: every split must partition the parent's result,
 * and every label must hold on the sub-instance it is assigned to.
 */
template <joinagg::Semiring S>
class HybridAudit : public joinagg::HybridObserver<typename S::value_type> {
public:
    using W = typename S::value_type;
    using Task = joinagg::PartitionTask<W>;

    explicit HybridAudit(std::uint64_t out_guess) : out_guess_(out_guess) {}

    void on_start(const joinagg::JoinTree& t, const joinagg::Query& node_query, int width) override {
        tree_ = t;
        node_query_ = node_query;
        width_ = width;
    }

    void on_split(const Task& parent, const Task& heavy, const Task& light, joinagg::NodeId, joinagg::NodeId) override {
        ++splits;
        const auto whole = oracle(parent.rels);
        const auto merged = joinagg::merge_results(std::vector{oracle(heavy.rels), oracle(light.rels)}, S{});
        if (!joinagg::same_result(whole, merged)) {
            ++split_violations;
            failures.push_back("split of t" + std::to_string(parent.id) + " loses or duplicates results");
        }
    }

    void on_label(const Task& task, joinagg::NodeId u1, joinagg::NodeId u2, joinagg::EdgeLabel label) override {
        ++labels;
        if (!holds(task, u1, u2, label)) {
            ++label_violations;
            failures.push_back("t" + std::to_string(task.id) + " (" + std::to_string(u1) + "," + std::to_string(u2) +
                               ") is not " + joinagg::label_name(label));
        }
    }

    int splits = 0;
    int labels = 0;
    int split_violations = 0;
    int label_violations = 0;
    std::vector<std::string> failures;

private:
    joinagg::Relation<W> oracle(const std::vector<joinagg::Relation<W>>& rels) const {
        joinagg::Instance<W> inst{rels};
        return joinagg::brute_force(node_query_, inst, S{});
    }

    bool holds(const Task& task, joinagg::NodeId u1, joinagg::NodeId u2, joinagg::EdgeLabel label) const {
        using namespace joinagg;
        const SubtreeView view = split(tree_, u1, u2, width_).first;
        const Query sub = subquery_of_subtree(tree_, view, node_query_);
        Instance<W> inst;
        for (NodeId u : view.nodes) inst.relations.push_back(task.rels[u]);
        const auto result = brute_force(sub, inst, S{});
        const AttrSet key = tree_.bag(u1) & tree_.bag(u2);
        const auto key_pos = column_positions(result.schema(), key);
        const auto rest_pos = column_positions(result.schema(), result.schema() - key);
        std::map<std::vector<Value>, std::uint64_t> per_key;
        std::set<std::vector<Value>> rest;
        for (std::size_t r = 0; r < result.size(); ++r) {
            std::vector<Value> k, o;
            for (int p : key_pos) k.push_back(result.row(r)[p]);
            for (int p : rest_pos) o.push_back(result.row(r)[p]);
            ++per_key[k];
            rest.insert(o);
        }
        const std::uint64_t threshold = hybrid_threshold(out_guess_, view.phi_num, width_);
        const auto& ru1 = task.rels[u1];
        const auto ru1_key = column_positions(ru1.schema(), key);
        bool all_large = true, all_small = true;
        for (std::size_t r = 0; r < ru1.size(); ++r) {
            std::vector<Value> k;
            for (int p : ru1_key) k.push_back(ru1.row(r)[p]);
            const auto it = per_key.find(k);
            const std::uint64_t n = it == per_key.end() ? 0 : it->second;
            all_large = all_large && n > threshold;
            all_small = all_small && n <= threshold;
        }
        switch (label) {
            case EdgeLabel::Large: return all_large;
            case EdgeLabel::Small: return all_small;
            case EdgeLabel::Limited: return all_small && rest.size() <= threshold;
            case EdgeLabel::Unlabeled: return true;
        }
        return false;
    }

    std::uint64_t out_guess_;
    joinagg::JoinTree tree_;
    joinagg::Query node_query_;
    int width_ = 1;
};

/// A random separated query with at least two relations: random acyclic, one ∃-component,
/// cleansed, then separated. Seeds that give a trivial query are skipped.
inline joinagg::Query random_separated(std::uint64_t seed) {
    using namespace joinagg;
    for (std::uint64_t s = seed;; s += 7919) {
        const auto ds = gen_random_acyclic({6, 4, 1, 3, s});
        const Query& q = ds.query;
        if (q.output().empty()) continue;
        for (const auto& comp : exists_connected_components(q)) {
            const Query c = plan_cleanse(edge_subquery(q, comp)).result;
            if (c.edge_count() < 2 || c.output().empty()) continue;
            const Query sep = plan_separate(c).result;
            if (sep.edge_count() >= 3 || seed % 4 == 0) return sep;
        }
    }
}

}  // namespace fixtures
