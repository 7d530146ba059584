#include "joinagg/width.hpp"

#include <algorithm>

#include <json.hpp>

#include "joinagg/error.hpp"

namespace joinagg {

Cover rho_star_acyclic(const Query& q, AttrSet s) {
    struct Live {
        EdgeId id;
        AttrSet attrs;
    };
    std::vector<Live> live;
    for (EdgeId e = 0; e < q.edge_count(); ++e)
        if (AttrSet cut = q.edge(e).attrs & s; !cut.empty()) live.push_back({e, cut});

    Cover cover;
    while (!live.empty()) {
        bool dropped = false;
        for (std::size_t i = 0; i < live.size() && !dropped; ++i)
            for (std::size_t j = 0; j < live.size(); ++j)
                if (i != j && live[i].attrs.subset_of(live[j].attrs)) {
                    live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
                    dropped = true;
                    break;
                }
        if (dropped) continue;

        AttrSet seen, repeated;
        for (const auto& l : live) {
            repeated |= seen & l.attrs;
            seen |= l.attrs;
        }
        const AttrSet unique = seen - repeated;
        auto pick = std::find_if(live.begin(), live.end(), [&](const Live& l) { return l.attrs.intersects(unique); });
        if (pick == live.end()) throw CyclicQueryError("edge cover requested for a cyclic induced query");
        cover.edges.push_back(pick->id);
        const AttrSet covered = pick->attrs;
        for (auto& l : live) l.attrs -= covered;
        std::erase_if(live, [](const Live& l) { return l.attrs.empty(); });
    }
    cover.size = static_cast<int>(cover.edges.size());
    std::sort(cover.edges.begin(), cover.edges.end());
    return cover;
}

namespace {

void require_acyclic(const Query& q) {
    if (!is_acyclic(q)) throw CyclicQueryError("width requested for a cyclic query");
}

/// Applies `f` to each cleansed ∃-component and returns the maximum (at least 1).
template <class F>
int max_over_components(const Query& q, F f) {
    require_acyclic(q);
    int best = 1;
    for (const auto& comp : exists_connected_components(q))
        best = std::max(best, f(plan_cleanse(edge_subquery(q, comp)).result));
    return best;
}

}  // namespace

int fn_fhtw(const Query& q) {
    return max_over_components(q, [](const Query& c) { return rho_star_acyclic(c, c.output()).size; });
}

int freew(const Query& q) {
    return max_over_components(q, [](const Query& c) {
        const AttrSet bullet = c.unique_attrs() & c.output();
        int n = 0;
        for (const auto& e : c.edges()) n += e.attrs.intersects(bullet) ? 1 : 0;
        return n;
    });
}

int projw(const Query& q) {
    return max_over_components(q, [](const Query& c) { return c.edge_count(); });
}

WidthReport analyze(const Query& q) {
    WidthReport r;
    auto tree = gyo_join_tree(q);
    if (auto* cyc = std::get_if<CyclicReport>(&tree)) {
        r.cyclic = *cyc;
        return r;
    }
    r.acyclic = true;
    r.fn_fhtw = fn_fhtw(q);
    r.freew = freew(q);
    r.projw = projw(q);
    r.free_connex = *r.fn_fhtw == 1;
    r.a_hierarchical = is_a_hierarchical(q);
    for (const auto& comp : exists_connected_components(q)) {
        const Query c = plan_cleanse(edge_subquery(q, comp)).result;
        for (EdgeId e : rho_star_acyclic(c, c.output()).edges)
            r.covering_edges.push_back(*q.find_edge(c.edge(e).name));
    }
    std::sort(r.covering_edges.begin(), r.covering_edges.end());
    return r;
}

std::string WidthReport::to_json(const Query& q) const {
    nlohmann::ordered_json j;
    j["acyclic"] = acyclic;
    if (!acyclic) {
        j["verdict"] = "cyclic";
        if (cyclic) j["detail"] = cyclic->describe(q);
        return j.dump(2);
    }
    j["fn_fhtw"] = *fn_fhtw;
    j["freew"] = *freew;
    j["projw"] = *projw;
    j["free_connex"] = free_connex;
    j["a_hierarchical"] = a_hierarchical;
    j["exponent"] = 1.0 - 1.0 / *fn_fhtw;
    std::vector<std::string> names;
    for (EdgeId e : covering_edges) names.push_back(q.edge(e).name);
    j["covering_edges"] = names;
    return j.dump(2);
}

}  // namespace joinagg
