#include <doctest.h>

#include "fixtures.hpp"
#include "joinagg/generators.hpp"
#include "joinagg/line.hpp"
#include "joinagg/oracle.hpp"

using namespace joinagg;

TEST_CASE("ceil_sqrt is exact") {
    CHECK(ceil_sqrt(0) == 0);
    CHECK(ceil_sqrt(1) == 1);
    CHECK(ceil_sqrt(2) == 2);
    CHECK(ceil_sqrt(16) == 4);
    CHECK(ceil_sqrt(17) == 5);
    CHECK(ceil_sqrt(1ULL << 62) == 1ULL << 31);
    CHECK(ceil_sqrt((1ULL << 62) + 1) == (1ULL << 31) + 1);
    CHECK(ceil_sqrt(~0ULL) == 1ULL << 32);
}

TEST_CASE("heavy classification") {
    Relation<std::uint64_t> r(AttrSet::of(0) | AttrSet::of(1));
    for (Value a = 0; a < 5; ++a) r.push_back({a, 1}, 1);
    r.push_back({0, 2}, 1);
    const auto [heavy, light] = classify_heavy(r, 1, 3, std::uint64_t{1});
    REQUIRE(heavy.size() == 1);
    CHECK(heavy.row(0)[0] == 1);
    CHECK(light.size() == 1);
}

TEST_CASE_TEMPLATE("line algorithm matches the oracle for any guess", S, Counting, Boolean, MaxProduct, SumProduct) {
    std::mt19937_64 rng(3);
    for (int k = 2; k <= 5; ++k) {
        const Query q = line_query(k);
        const auto shape = *as_line_query(q);
        for (int trial = 0; trial < 15; ++trial) {
            const auto inst = fixtures::random_for<S>(q, 14, 4, rng);
            const auto expected = brute_force(q, inst, S{});
            for (std::uint64_t guess : {1ULL, 4ULL, 16ULL, 1000ULL}) {
                CAPTURE(k);
                CAPTURE(guess);
                CHECK(same_result(expected, run_line(q, shape, inst, S{}, guess)));
            }
        }
    }
}

TEST_CASE("line algorithm beats Yannakakis on the adversarial instance") {
    const auto ds = gen_line_adversarial(20000, 400, 1);
    const auto inst = lift<Counting>(ds.rows, true);
    const auto shape = *as_line_query(ds.query);
    ExecContext line_ctx;
    const auto r = run_line(ds.query, shape, inst, Counting{}, 400, &line_ctx);
    CHECK(r.size() == 400);
    ExecContext yk_ctx;
    const auto y = yannakakis(ds.query, require_join_tree(ds.query), 0, inst, Counting{}, &yk_ctx);
    CHECK(same_result(r, y));
    CHECK(line_ctx.stats().max_intermediate_rows * 10 < yk_ctx.stats().max_intermediate_rows);
}

TEST_CASE("KMV estimate") {
    // Small outputs are counted exactly.
    const Query q = line_query(2);
    Instance<std::uint64_t> inst;
    inst.relations.emplace_back(q.edge(0).attrs);
    inst.relations.emplace_back(q.edge(1).attrs);
    inst.relations[0].push_back({1, 1}, 1);
    inst.relations[0].push_back({2, 1}, 1);
    inst.relations[1].push_back({1, 5}, 1);
    inst.relations[1].push_back({1, 6}, 1);
    CHECK(kmv_estimate_line(q, inst, 8, 3) == doctest::Approx(4));

    const auto ds = gen_star_hard(2, 20000, 10000, 9);
    const Query star = ds.query;
    CHECK_THROWS_AS(kmv_estimate_line(star_query(3), lift<Counting>(gen_star_hard(3, 300, 8, 1).rows, true), 8, 3),
                    PreconditionError);
    const auto est = kmv_estimate_line(star, lift<Counting>(ds.rows, true), 64, 9);
    CHECK(est > 5000);
    CHECK(est < 20000);
    CHECK_THROWS_AS(kmv_estimate_line(q, inst, 1, 3), PreconditionError);
}
