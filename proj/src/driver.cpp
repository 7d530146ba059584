#include "joinagg/driver.hpp"

namespace joinagg {

Algorithm parse_algorithm(const std::string& name) {
    if (name == "auto") return Algorithm::Auto;
    if (name == "yannakakis") return Algorithm::Yannakakis;
    if (name == "line") return Algorithm::Line;
    if (name == "hybrid") return Algorithm::Hybrid;
    throw PreconditionError("unknown algorithm '" + name + "'");
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Auto: return "auto";
        case Algorithm::Yannakakis: return "yannakakis";
        case Algorithm::Line: return "line";
        case Algorithm::Hybrid: return "hybrid";
    }
    return "?";
}

JoinTree join_tree_or_throw(const Query& q) {
    auto res = gyo_join_tree(q);
    if (auto* report = std::get_if<CyclicReport>(&res)) throw CyclicQueryError(report->describe(q));
    return std::get<JoinTree>(std::move(res));
}

bool needs_out_guess(const Query& q) {
    for (const auto& comp : exists_connected_components(q)) {
        const Query c = plan_cleanse(edge_subquery(q, comp)).result;
        if (c.edge_count() > 1 && fn_fhtw(c) > 1 && !as_line_query(c)) return true;
    }
    return false;
}

}  // namespace joinagg
