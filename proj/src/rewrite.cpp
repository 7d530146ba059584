#include "joinagg/rewrite.hpp"

#include "joinagg/error.hpp"
#include "joinagg/join_tree.hpp"
#include "joinagg/width.hpp"

namespace joinagg {

SeparatePlan plan_separate(const Query& q) {
    if (!is_cleansed(q)) throw PreconditionError("separate requires a cleansed query");
    if (q.edge_count() > 1 && exists_connected_components(q).size() != 1)
        throw PreconditionError("separate requires an exists-connected query");
    if (!is_acyclic(q)) throw CyclicQueryError("separate requires an acyclic query");

    SeparatePlan plan;
    std::vector<std::string> names = q.names();
    std::vector<Hyperedge> edges = q.edges();
    AttrSet y = q.output();
    Query scratch = Query::from_parts(names, edges, y);
    auto fresh_attr = [&](const std::string& name) {
        const AttrId id = scratch.add_attribute_name(name);
        names.push_back(name);
        return id;
    };

    const Cover cover = rho_star_acyclic(q, y);
    for (AttrId a : q.output()) {
        if (q.degree(a) <= 1) continue;
        EdgeId kappa = -1;
        for (EdgeId e : cover.edges)
            if (q.edge(e).attrs.contains(a)) {
                kappa = e;
                break;
            }
        if (kappa < 0) throw InvariantViolation("output attribute outside the cover");
        const AttrId x = fresh_attr("__xA_" + q.name(a));
        edges[kappa].attrs.insert(x);
        y.erase(a);
        y.insert(x);
        plan.steps.push_back({SeparateStep::Kind::CopyAttr, a, x, kappa, {}});
    }

    const int m = static_cast<int>(edges.size());
    for (EdgeId e = 0; e < m; ++e) {
        const AttrSet outs = edges[e].attrs & y;
        if (outs.empty()) continue;
        const AttrSet core = edges[e].attrs - y;
        bool hosted = core.empty();
        for (EdgeId o = 0; o < static_cast<EdgeId>(edges.size()) && !hosted; ++o)
            hosted = o != e && core.subset_of(edges[o].attrs);
        if (hosted) continue;
        const std::string name = "__xe_" + edges[e].name;
        const AttrId x = fresh_attr(name);
        edges.push_back({name, outs | AttrSet::of(x)});
        y -= outs;
        y.insert(x);
        plan.steps.push_back({SeparateStep::Kind::NewRelation, -1, x, e, outs});
    }

    plan.result = Query::from_parts(std::move(names), std::move(edges), y);
    if (!is_separated(plan.result)) throw InvariantViolation("separate produced a non-separated query");
    return plan;
}

}  // namespace joinagg
