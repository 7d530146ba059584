#include <doctest.h>

#include "joinagg/relation.hpp"
#include "joinagg/semiring.hpp"

using namespace joinagg;

namespace {

const AttrSet A = AttrSet::of(0), B = AttrSet::of(1), C = AttrSet::of(2);

Relation<std::uint64_t> rel(AttrSet schema, std::initializer_list<std::pair<std::vector<Value>, std::uint64_t>> rows) {
    Relation<std::uint64_t> r(schema);
    for (const auto& [vals, w] : rows) r.push_back(vals.data(), w);
    return r;
}

}  // namespace

TEST_CASE("normalize merges duplicates") {
    const auto r = normalize(rel(A | B, {{{1, 2}, 3}, {{1, 2}, 4}, {{2, 2}, 1}}), Counting{});
    CHECK(same_result(r, rel(A | B, {{{1, 2}, 7}, {{2, 2}, 1}})));
}

TEST_CASE("projection aggregates") {
    const Counting ops;
    const auto r = rel(A | B, {{{1, 2}, 3}, {{1, 3}, 4}, {{2, 2}, 1}});
    CHECK(same_result(project_aggregate(r, A, ops), rel(A, {{{1}, 7}, {{2}, 1}})));
    const auto scalar = project_aggregate(r, AttrSet{}, ops);
    REQUIRE(scalar.size() == 1);
    CHECK(scalar.weight(0) == 8);
    CHECK(project_aggregate(Relation<std::uint64_t>(A | B), AttrSet{}, ops).empty());
    CHECK_THROWS_AS(project_aggregate(r, C, ops), SchemaError);
    CHECK(same_result(project_keys(r, B, std::uint64_t{1}), rel(B, {{{2}, 1}, {{3}, 1}})));
}

TEST_CASE("semi-join and anti-semi-join") {
    const auto r = rel(A | B, {{{1, 2}, 3}, {{1, 3}, 4}, {{2, 2}, 1}});
    const auto keys = rel(B | C, {{{2, 9}, 5}});
    CHECK(same_result(semi_join(r, keys), rel(A | B, {{{1, 2}, 3}, {{2, 2}, 1}})));
    const auto bkeys = rel(B, {{{2}, 1}});
    CHECK(same_result(anti_semi_join(r, bkeys), rel(A | B, {{{1, 3}, 4}})));
    CHECK_THROWS_AS(anti_semi_join(r, keys), SchemaError);
    // No shared attributes: kept iff the other side is non-empty.
    CHECK(semi_join(r, rel(C, {{{0}, 1}})).size() == 3);
    CHECK(semi_join(r, Relation<std::uint64_t>(C)).empty());
}

TEST_CASE("join and join_aggregate") {
    const Counting ops;
    const auto r = rel(A | B, {{{1, 2}, 2}, {{1, 3}, 3}});
    const auto s = rel(B | C, {{{2, 7}, 5}, {{3, 7}, 7}, {{3, 8}, 1}});
    const auto full = join(r, s, ops);
    CHECK(same_result(full, rel(A | B | C, {{{1, 2, 7}, 10}, {{1, 3, 7}, 21}, {{1, 3, 8}, 3}})));
    const auto agg = join_aggregate(r, s, A | C, ops);
    CHECK(same_result(agg, rel(A | C, {{{1, 7}, 31}, {{1, 8}, 3}})));
    const auto cross = join(rel(A, {{{1}, 2}, {{2}, 3}}), rel(C, {{{5}, 4}}), ops);
    CHECK(cross.size() == 2);
}

TEST_CASE("merge_results adds per key") {
    const Counting ops;
    const auto merged = merge_results(std::vector{rel(A, {{{1}, 2}}), rel(A, {{{1}, 3}, {{2}, 1}})}, ops);
    CHECK(same_result(merged, rel(A, {{{1}, 5}, {{2}, 1}})));
    CHECK_THROWS_AS(merge_results(std::vector{rel(A, {}), rel(B, {})}, ops), SchemaError);
}

TEST_CASE("context tracks and enforces the row budget") {
    const Counting ops;
    const auto r = rel(A | B, {{{1, 1}, 1}, {{2, 1}, 1}, {{3, 1}, 1}});
    const auto s = rel(B | C, {{{1, 1}, 1}, {{1, 2}, 1}, {{1, 3}, 1}});
    ExecContext ctx;
    join(r, s, ops, &ctx);
    CHECK(ctx.stats().max_intermediate_rows == 9);
    CHECK(ctx.stats().total_rows_materialized >= 9);

    ExecContext tight(5);
    CHECK_THROWS_AS(join(r, s, ops, &tight), BudgetExceeded);
}

TEST_CASE("sorted gives a canonical order") {
    const auto r = rel(A | B, {{{2, 1}, 1}, {{1, 5}, 2}, {{1, 2}, 3}});
    const auto s = sorted(r);
    CHECK(s.row(0)[1] == 2);
    CHECK(s.row(2)[0] == 2);
    CHECK(same_result(r, s));
    CHECK_FALSE(same_result(r, rel(A | B, {{{2, 1}, 1}, {{1, 5}, 2}, {{1, 2}, 4}})));
}

TEST_CASE("tuple arity is checked") {
    Relation<std::uint64_t> r(A | B);
    CHECK_THROWS_AS(r.push_back({1}, 1), SchemaError);
}
