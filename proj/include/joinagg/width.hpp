#pragma once

#include <optional>
#include <string>
#include <vector>

#include "joinagg/join_tree.hpp"
#include "joinagg/query.hpp"

namespace joinagg {

/// Integral edge cover of q[s]; edge ids refer to q.
struct Cover {
    int size = 0;
    std::vector<EdgeId> edges;
};

/**
 * Minimum edge cover of q[s] for acyclic q[s]. Greedy: drop the lowest-id relation
 * contained in another, else select the lowest-id relation holding an attribute no
 * other relation holds and delete its attributes. Throws CyclicQueryError when stuck.
 */
Cover rho_star_acyclic(const Query& q, AttrSet s);

/// The following require an acyclic query and throw CyclicQueryError otherwise.
int fn_fhtw(const Query& q);
int freew(const Query& q);
int projw(const Query& q);

struct WidthReport {
    bool acyclic = false;
    std::optional<int> fn_fhtw;
    std::optional<int> freew;
    std::optional<int> projw;
    bool free_connex = false;
    bool a_hierarchical = false;
    /// Union over ∃-components of an optimal cover of the cleansed component's q[y].
    std::vector<EdgeId> covering_edges;
    std::optional<CyclicReport> cyclic;

    std::string to_json(const Query& q) const;
};

WidthReport analyze(const Query& q);

}  // namespace joinagg
