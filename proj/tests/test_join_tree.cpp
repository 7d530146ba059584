#include <doctest.h>

#include "fixtures.hpp"
#include "joinagg/generators.hpp"
#include "joinagg/join_tree.hpp"

using namespace joinagg;

TEST_CASE("gyo builds a valid join tree") {
    for (const Query& q : {fixtures::three_arms(), fixtures::three_arms_separated(), line_query(5), star_query(4)}) {
        auto res = gyo_join_tree(q);
        REQUIRE(std::holds_alternative<JoinTree>(res));
        const auto& t = std::get<JoinTree>(res);
        CHECK(t.size() == q.edge_count());
        CHECK(t.tree_edges().size() == static_cast<std::size_t>(q.edge_count() - 1));
        CHECK_FALSE(validate_join_tree(q, t));
    }
}

TEST_CASE("gyo reports the cyclic residue") {
    const Query tri = fixtures::triangle();
    auto res = gyo_join_tree(tri);
    REQUIRE(std::holds_alternative<CyclicReport>(res));
    CHECK(std::get<CyclicReport>(res).residue.size() == 3);
    CHECK_FALSE(is_acyclic(tri));
    CHECK_THROWS_AS(require_join_tree(tri), CyclicQueryError);
    const std::string msg = std::get<CyclicReport>(res).describe(tri);
    CHECK(msg.find("R") != std::string::npos);
    CHECK(msg.find("T") != std::string::npos);

    // A cycle with an ear hanging off it keeps only the cycle.
    const Query eared = Query::build({"A", "B", "C", "D"},
                                     {{"E", {"C", "D"}}, {"R", {"A", "B"}}, {"S", {"B", "C"}}, {"T", {"A", "C"}}}, {});
    auto r2 = gyo_join_tree(eared);
    REQUIRE(std::holds_alternative<CyclicReport>(r2));
    CHECK(std::get<CyclicReport>(r2).residue == std::vector<EdgeId>{1, 2, 3});
}

TEST_CASE("validate_join_tree catches running intersection") {
    const Query q = line_query(3);
    JoinTree t({{q.edge(0).attrs, 0, {0}}, {q.edge(2).attrs, 2, {2}}, {q.edge(1).attrs, 1, {1}}});
    t.add_edge(0, 1);
    t.add_edge(1, 2);
    const auto err = validate_join_tree(q, t);
    REQUIRE(err);
    CHECK(err->find("running intersection") != std::string::npos);
}

TEST_CASE("separated tree of the rewritten query") {
    const Query q = fixtures::three_arms_separated();
    const JoinTree t = separated_join_tree(q);
    REQUIRE(t.size() == 6);
    CHECK(t.leaves() == std::vector<NodeId>{0, 1, 2, 3});
    CHECK(t.adjacent(4, 5));
    CHECK(t.adjacent(0, 4));
    CHECK(t.adjacent(1, 4));
    CHECK(t.adjacent(2, 5));
    CHECK(t.adjacent(3, 5));
    CHECK_FALSE(validate_join_tree(q, t));

    const auto [left, right] = split(t, 4, 5, 4);
    CHECK(left.nodes == std::vector<NodeId>{0, 1, 4});
    CHECK(left.phi_num == 2);
    CHECK(left.phi_den == 4);
    CHECK(right.leaves == std::vector<NodeId>{2, 3});
    const auto [leaf_side, rest] = split(t, 0, 4, 4);
    CHECK(leaf_side.phi_num == 1);
    CHECK(rest.phi_num == 3);

    const AttrSet cut = t.bag(4) & t.bag(5);
    CHECK(view_output(t, left, q) == ((q.output() & view_attrs(t, left)) | cut));
    const Query sub = subquery_of_subtree(t, left, q);
    CHECK(sub.edge_count() == 3);
    CHECK(sub.edge(2).name == "R5");
    CHECK_THROWS_AS(split(t, 0, 1, 4), PreconditionError);
}

TEST_CASE("separated tree contracts a redundant core") {
    const JoinTree t = separated_join_tree(fixtures::matrix_mult());
    CHECK(t.size() == 2);
    CHECK(t.adjacent(0, 1));

    const Query star = star_query(3);
    const JoinTree s = separated_join_tree(star);
    REQUIRE(s.size() == 4);
    CHECK_FALSE(s.node(3).source);
    CHECK(s.leaves() == std::vector<NodeId>{0, 1, 2});
}

TEST_CASE("separated tree preconditions") {
    CHECK_THROWS_AS(separated_join_tree(fixtures::three_arms()), PreconditionError);
    const JoinTree single = separated_join_tree(Query::build({"A"}, {{"R", {"A"}}}, {"A"}));
    CHECK(single.size() == 1);
}

TEST_CASE("rendering") {
    const Query q = fixtures::three_arms_separated();
    const JoinTree t = separated_join_tree(q);
    const std::string text = t.to_text(q, 4);
    CHECK(text.rfind("u4 R5", 0) == 0);
    CHECK(t.to_dot(q).find("u4 -- u5") != std::string::npos);
}
