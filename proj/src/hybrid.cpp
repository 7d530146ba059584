#include "joinagg/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <boost/multiprecision/cpp_int.hpp>

namespace joinagg {

std::string label_name(EdgeLabel l) {
    switch (l) {
        case EdgeLabel::Unlabeled: return "unlabeled";
        case EdgeLabel::Small: return "small";
        case EdgeLabel::Large: return "large";
        case EdgeLabel::Limited: return "limited";
    }
    return "?";
}

std::uint64_t hybrid_threshold(std::uint64_t out_guess, int num, int den) {
    using boost::multiprecision::cpp_int;
    if (den <= 0 || num < 0) throw PreconditionError("threshold exponent must be a non-negative fraction");
    if (num == 0 || out_guess <= 1) return num == 0 ? 1 : out_guess;
    if (num >= den) {
        // Exponents above one do not occur on a tree; saturate rather than overflow.
        return num == den ? out_guess : ~0ULL;
    }
    const cpp_int target = boost::multiprecision::pow(cpp_int(out_guess), num);
    auto fits = [&](std::uint64_t r) { return boost::multiprecision::pow(cpp_int(r), den) <= target; };
    auto r = static_cast<std::uint64_t>(std::pow(static_cast<long double>(out_guess), static_cast<long double>(num) / den));
    while (r > 0 && !fits(r)) --r;
    while (fits(r + 1)) ++r;
    return r;
}

std::vector<std::pair<NodeId, NodeId>> saturate_limited(const JoinTree& t, EdgeLabels& labels) {
    std::vector<std::pair<NodeId, NodeId>> added;
    bool changed = true;
    while (changed) {
        changed = false;
        for (NodeId u1 = 0; u1 < t.size(); ++u1) {
            if (t.is_leaf(u1)) continue;
            for (NodeId u2 : t.neighbors(u1)) {
                if (labels.get(u1, u2) != EdgeLabel::Unlabeled) continue;
                bool premise = true;
                for (NodeId u3 : t.neighbors(u1))
                    if (u3 != u2 && labels.get(u3, u1) != EdgeLabel::Limited) premise = false;
                if (!premise) continue;
                labels.set(u1, u2, EdgeLabel::Limited);
                added.emplace_back(u1, u2);
                changed = true;
            }
        }
    }
    return added;
}

bool large_reverse(EdgeLabels& labels, NodeId u1, NodeId u2) {
    if (labels.get(u1, u2) != EdgeLabel::Large) return false;
    if (labels.get(u2, u1) == EdgeLabel::Limited) return false;
    labels.set(u2, u1, EdgeLabel::Limited);
    return true;
}

std::optional<NodeId> check_optimal(const JoinTree& t, const EdgeLabels& labels) {
    for (NodeId u : t.leaves())
        for (NodeId v : t.neighbors(u))
            if (labels.small(v, u)) return u;
    return std::nullopt;
}

std::optional<std::pair<NodeId, NodeId>> choose_partition_edge(const JoinTree& t, const EdgeLabels& labels) {
    std::optional<std::tuple<std::size_t, NodeId, NodeId>> best;
    for (NodeId u1 = 0; u1 < t.size(); ++u1) {
        for (NodeId u2 : t.neighbors(u1)) {
            if (labels.get(u1, u2) != EdgeLabel::Unlabeled) continue;
            bool ok = true;
            for (NodeId u3 : t.neighbors(u1))
                if (u3 != u2 && !labels.small(u3, u1)) ok = false;
            if (!ok) continue;
            const std::tuple<std::size_t, NodeId, NodeId> cand{split(t, u1, u2, 1).first.nodes.size(), u1, u2};
            if (!best || cand < *best) best = cand;
        }
    }
    if (!best) return std::nullopt;
    return std::make_pair(std::get<1>(*best), std::get<2>(*best));
}

NodeId identify_leaf(const JoinTree& t, const EdgeLabels& labels) {
    if (t.size() == 1) return 0;
    std::vector<bool> alive(t.size(), true);
    std::vector<bool> is_out_leaf(t.size(), false);
    for (NodeId u : t.leaves()) is_out_leaf[u] = true;

    auto rooted = [&](NodeId r) {
        std::vector<NodeId> alive_nodes;
        for (NodeId u = 0; u < t.size(); ++u)
            if (alive[u]) alive_nodes.push_back(u);
        return root_view(t, alive_nodes, r);
    };
    while (true) {
        int remaining = 0;
        for (NodeId u = 0; u < t.size(); ++u) remaining += alive[u] ? 1 : 0;
        std::vector<NodeId> roots;
        for (NodeId u = 0; u < t.size(); ++u)
            if (alive[u] && is_out_leaf[u]) roots.push_back(u);
        if (roots.empty()) throw PreconditionError("no output leaf left while identifying a leaf");
        if (remaining == 1) return roots.front();

        for (NodeId r : roots) {
            const ViewRooting view = rooted(r);
            bool all_small = true;
            for (NodeId u : view.preorder)
                if (u != r && !labels.small(u, view.parent[u])) all_small = false;
            if (all_small) return r;
        }
        bool pruned = false;
        for (NodeId r : roots) {
            const ViewRooting view = rooted(r);
            // Post-order: a subtree is all-small when every node below its top has a small edge up.
            std::vector<bool> interior_small(t.size(), true);
            for (auto it = view.preorder.rbegin(); it != view.preorder.rend(); ++it) {
                const NodeId u = *it;
                for (NodeId c : view.children[u])
                    interior_small[u] = interior_small[u] && interior_small[c] && labels.small(c, u);
            }
            for (NodeId u : view.preorder) {
                if (u == r || labels.get(u, view.parent[u]) != EdgeLabel::Large || !interior_small[u]) continue;
                std::vector<NodeId> stack{u};
                while (!stack.empty()) {
                    const NodeId x = stack.back();
                    stack.pop_back();
                    alive[x] = false;
                    for (NodeId c : view.children[x]) stack.push_back(c);
                }
                pruned = true;
                break;
            }
            if (pruned) break;
        }
        if (!pruned) throw PreconditionError("labels do not identify a leaf meeting the optimal condition");
    }
}

}  // namespace joinagg
