#include <doctest.h>

#include "fixtures.hpp"
#include "joinagg/generators.hpp"
#include "joinagg/width.hpp"

using namespace joinagg;

TEST_CASE("three-arm query widths") {
    const Query q = fixtures::three_arms();
    CHECK(freew(q) == 3);
    CHECK(fn_fhtw(q) == 4);
    CHECK(projw(q) == 5);
}

TEST_CASE("line and star families") {
    for (int k = 2; k <= 6; ++k) {
        CAPTURE(k);
        CHECK(fn_fhtw(line_query(k)) == 2);
        CHECK(fn_fhtw(star_query(k)) == k);
    }
}

TEST_CASE("free-connex queries have width one") {
    const Query q = Query::build({"A", "B", "C"}, {{"R", {"A", "B"}}, {"S", {"B", "C"}}}, {"A", "B"});
    CHECK(fn_fhtw(q) == 1);
    CHECK(analyze(q).free_connex);
    const Query boolean = Query::build({"A", "B"}, {{"R", {"A", "B"}}, {"S", {"B"}}}, {});
    CHECK(fn_fhtw(boolean) == 1);
}

TEST_CASE("edge cover of an induced query") {
    const Query q = fixtures::three_arms();
    const Cover c = rho_star_acyclic(q, q.output());
    CHECK(c.size == 4);
    CHECK(c.edges == std::vector<EdgeId>{0, 1, 2, 4});
}

TEST_CASE("cyclic queries") {
    CHECK_THROWS_AS(fn_fhtw(fixtures::triangle()), CyclicQueryError);
    const WidthReport r = analyze(fixtures::triangle());
    CHECK_FALSE(r.acyclic);
    CHECK_FALSE(r.fn_fhtw);
    CHECK(r.to_json(fixtures::triangle()).find("\"cyclic\"") != std::string::npos);
}

TEST_CASE("report serialization") {
    const Query q = line_query(4);
    const WidthReport r = analyze(q);
    CHECK(r.acyclic);
    CHECK_FALSE(r.a_hierarchical);
    const std::string json = r.to_json(q);
    CHECK(json.find("\"fn_fhtw\": 2") != std::string::npos);
    CHECK(json.find("\"exponent\": 0.5") != std::string::npos);
}
