#include <doctest.h>

#include "fixtures.hpp"
#include "joinagg/generators.hpp"
#include "joinagg/oracle.hpp"
#include "joinagg/yannakakis.hpp"

using namespace joinagg;

TEST_CASE("matrix multiplication over counting") {
    const Query q = fixtures::matrix_mult();
    Instance<std::uint64_t> inst;
    inst.relations.emplace_back(q.edge(0).attrs);
    inst.relations.emplace_back(q.edge(1).attrs);
    inst.relations[0].push_back({1, 1}, 1);
    inst.relations[0].push_back({1, 2}, 1);
    inst.relations[1].push_back({1, 3}, 1);
    inst.relations[1].push_back({2, 3}, 1);
    const JoinTree t = require_join_tree(q);
    for (NodeId root : {0, 1}) {
        const auto r = yannakakis(q, t, root, inst, Counting{});
        REQUIRE(r.size() == 1);
        CHECK(r.row(0)[0] == 1);
        CHECK(r.row(0)[1] == 3);
        CHECK(r.weight(0) == 2);
    }
}

TEST_CASE("brute force on a known instance") {
    const Query q = Query::build({"A", "B"}, {{"R", {"A", "B"}}, {"S", {"B"}}}, {});
    Instance<std::uint64_t> inst;
    inst.relations.emplace_back(q.edge(0).attrs);
    inst.relations.emplace_back(q.edge(1).attrs);
    inst.relations[0].push_back({1, 1}, 2);
    inst.relations[0].push_back({2, 1}, 3);
    inst.relations[0].push_back({2, 5}, 7);
    inst.relations[1].push_back({1}, 10);
    const auto r = brute_force(q, inst, Counting{});
    REQUIRE(r.size() == 1);
    CHECK(r.weight(0) == 50);
    CHECK_THROWS_AS(brute_force(q, inst, Counting{}, 0.5), PreconditionError);
}

TEST_CASE_TEMPLATE("yannakakis matches the oracle from every root", S, Counting, Boolean, MaxProduct, SumProduct) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const auto ds = gen_random_acyclic({5, 4, 12, 3, 100 + static_cast<std::uint64_t>(trial)});
        const Query& q = ds.query;
        const auto inst = fixtures::random_for<S>(q, 12, 3, rng);
        const JoinTree t = require_join_tree(q);
        const auto expected = brute_force(q, inst, S{});
        for (NodeId root = 0; root < t.size(); ++root) {
            CAPTURE(trial);
            CAPTURE(root);
            CHECK(same_result(expected, yannakakis(q, t, root, inst, S{})));
        }
    }
}

TEST_CASE("full reducer removes exactly the dangling tuples") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const auto ds = gen_random_acyclic({5, 4, 15, 3, 500 + static_cast<std::uint64_t>(trial)});
        const Query& q = ds.query;
        const auto inst = fixtures::random_for<Counting>(q, 15, 3, rng);
        const auto reduced = full_reducer(q, require_join_tree(q), inst, Counting{});
        std::vector<std::vector<bool>> used(q.edge_count());
        for (EdgeId e = 0; e < q.edge_count(); ++e) used[e].assign(inst.relations[e].size(), false);
        enumerate_full_join<std::uint64_t>(q, inst, [&](const std::vector<int>& rows, const std::vector<Value>&) {
            for (std::size_t e = 0; e < rows.size(); ++e) used[e][rows[e]] = true;
        });
        for (EdgeId e = 0; e < q.edge_count(); ++e) {
            std::size_t live = 0;
            for (bool b : used[e]) live += b ? 1 : 0;
            CHECK(reduced.relations[e].size() == live);
        }
        CHECK(same_result(brute_force(q, inst, Counting{}), brute_force(q, reduced, Counting{})));
    }
}

TEST_CASE("malformed join trees are rejected") {
    const Query q = line_query(3);
    JoinTree t({{q.edge(0).attrs, 0, {0}}, {q.edge(2).attrs, 2, {2}}, {q.edge(1).attrs, 1, {1}}});
    t.add_edge(0, 1);
    t.add_edge(1, 2);
    Instance<std::uint64_t> inst;
    for (const auto& e : q.edges()) inst.relations.emplace_back(e.attrs);
    CHECK_THROWS_AS(yannakakis(q, t, 0, inst, Counting{}), PreconditionError);
}

TEST_CASE("instrumented runs count semiring work") {
    const auto ds = gen_star_hard(2, 400, 100, 3);
    Instrumented<Counting> ops;
    const auto inst = lift<Counting>(ds.rows, true);
    ExecContext ctx;
    const auto r = yannakakis(ds.query, require_join_tree(ds.query), 0, inst, ops, &ctx);
    CHECK(r.size() == 100);
    CHECK(ops.operations() > 0);
    CHECK(ctx.stats().max_intermediate_rows >= 100);
}
