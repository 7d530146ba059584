#include <doctest.h>

#include "audit.hpp"
#include "fixtures.hpp"
#include "joinagg/driver.hpp"

using namespace joinagg;

TEST_CASE("separating the three-arm query") {
    const Query q = fixtures::three_arms();
    const auto plan = plan_separate(q);
    const Query& s = plan.result;
    CHECK(is_separated(s));
    CHECK(s.edge_count() == 6);
    CHECK(fn_fhtw(s) == fn_fhtw(q));
    REQUIRE(plan.steps.size() == 2);
    CHECK(plan.steps[0].kind == SeparateStep::Kind::CopyAttr);
    CHECK(s.name(plan.steps[0].fresh) == "__xA_C2");
    CHECK(plan.steps[1].kind == SeparateStep::Kind::NewRelation);
    CHECK(s.edge(5).name == "__xe_R6");
    CHECK(separated_join_tree(s).leaves().size() == 4);
}

TEST_CASE_TEMPLATE("rewrites preserve results after playback", S, Counting, SumProduct) {
    std::mt19937_64 rng(4);
    for (std::uint64_t seed = 1; seed <= 80; ++seed) {
        const auto ds = gen_random_acyclic({6, 4, 1, 3, seed});
        const Query& q = ds.query;
        const auto inst = fixtures::random_for<S>(q, 12, 3, rng);
        for (const auto& comp : exists_connected_components(q)) {
            const Query cq = edge_subquery(q, comp);
            Instance<typename S::value_type> ci;
            for (EdgeId e : comp) ci.relations.push_back(inst.relations[e]);
            const auto expected = brute_force(cq, ci, S{});
            RewriteLog log;
            auto [cl_q, cl_inst] = cleanse(cq, ci, S{}, nullptr, &log);
            CHECK(is_cleansed(cl_q));
            CHECK(same_result(expected, brute_force(cl_q, cl_inst, S{})));
            auto [sep_q, sep_inst] = separate(cl_q, cl_inst, S{}, log);
            CHECK(is_separated(sep_q));
            CHECK(fn_fhtw(sep_q) == fn_fhtw(cl_q));
            CHECK(sep_inst.input_size() <= 2 * cl_inst.input_size());
            CAPTURE(seed);
            CHECK(same_result(expected, playback(brute_force(sep_q, sep_inst, S{}), log)));
        }
    }
}

TEST_CASE_TEMPLATE("evaluate matches the oracle under every algorithm", S, Counting, Boolean, MaxProduct, SumProduct) {
    std::mt19937_64 rng(17);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto ds = gen_random_acyclic({6, 4, 1, 3, 1000 + seed});
        const Query& q = ds.query;
        const auto inst = fixtures::random_for<S>(q, 12, 3, rng);
        const auto expected = brute_force(q, inst, S{});
        const std::uint64_t out = std::max<std::uint64_t>(1, expected.size());
        CAPTURE(seed);
        CHECK(same_result(expected, evaluate(q, inst, S{})));
        EvalOptions opt;
        opt.out_guess = out;
        CHECK(same_result(expected, evaluate(q, inst, S{}, opt)));
        opt.algorithm = Algorithm::Hybrid;
        CHECK(same_result(expected, evaluate(q, inst, S{}, opt)));
        opt.threads = 3;
        CHECK(same_result(expected, evaluate(q, inst, S{}, opt)));
        opt.algorithm = Algorithm::Yannakakis;
        CHECK(same_result(expected, evaluate(q, inst, S{}, opt)));
    }
}

TEST_CASE("routing by shape") {
    const auto ds = gen_random_line(3, 300, 20, 5);
    const auto inst = lift<Counting>(ds.rows, false);
    EvalReport rep;
    const auto r = evaluate(ds.query, inst, Counting{}, EvalOptions{}, &rep);
    CHECK(fixtures::matches_oracle<Counting>(ds.query, inst, r));
    REQUIRE(rep.components.size() == 1);
    CHECK(rep.components[0].algorithm == "line");
    CHECK(rep.components[0].out_guess);
    CHECK(rep.doubling_trials == 0);

    EvalOptions hybrid;
    hybrid.algorithm = Algorithm::Hybrid;
    hybrid.out_guess = 100;
    evaluate(ds.query, inst, Counting{}, hybrid, &rep);
    CHECK(rep.components[0].algorithm == "hybrid");
    CHECK(rep.components[0].hybrid.width == 2);

    const auto star = gen_star_hard(3, 300, 27, 2);
    const auto sinst = lift<Counting>(star.rows, true);
    EvalOptions guess;
    guess.out_guess = 27;
    evaluate(star.query, sinst, Counting{}, guess, &rep);
    CHECK(rep.components[0].algorithm == "hybrid");
    CHECK(rep.components[0].fn_fhtw == 3);

    const Query free_connex = Query::build({"A", "B", "C"}, {{"R", {"A", "B"}}, {"S", {"B", "C"}}}, {"A", "B"});
    Instance<std::uint64_t> fi;
    fi.relations.emplace_back(free_connex.edge(0).attrs);
    fi.relations.emplace_back(free_connex.edge(1).attrs);
    fi.relations[0].push_back({1, 2}, 1);
    fi.relations[1].push_back({2, 3}, 2);
    fi.relations[1].push_back({2, 4}, 5);
    const auto fr = evaluate(free_connex, fi, Counting{}, guess, &rep);
    REQUIRE(fr.size() == 1);
    CHECK(fr.weight(0) == 7);
    CHECK(rep.components[0].algorithm == "yannakakis");

    EvalOptions line;
    line.algorithm = Algorithm::Line;
    line.out_guess = 10;
    CHECK_THROWS_AS(evaluate(star.query, sinst, Counting{}, line), PreconditionError);
}

TEST_CASE("components combine by join and scalars multiply") {
    const Query q = Query::build({"A", "B", "C", "D"}, {{"R", {"A", "B"}}, {"S", {"B", "C"}}, {"T", {"D"}}}, {"A", "B", "C"});
    Instance<std::uint64_t> inst;
    for (const auto& e : q.edges()) inst.relations.emplace_back(e.attrs);
    inst.relations[0].push_back({1, 1}, 2);
    inst.relations[0].push_back({2, 1}, 3);
    inst.relations[1].push_back({1, 7}, 5);
    inst.relations[2].push_back({0}, 10);
    inst.relations[2].push_back({1}, 1);
    EvalReport rep;
    const auto r = evaluate(q, inst, Counting{}, EvalOptions{}, &rep);
    CHECK(rep.components.size() == 3);
    CHECK(fixtures::matches_oracle<Counting>(q, inst, r));

    inst.relations[2] = Relation<std::uint64_t>(q.edge(2).attrs);
    const auto none = evaluate(q, inst, Counting{});
    CHECK(none.empty());
    CHECK(none.schema() == q.output());
}

TEST_CASE("boolean queries") {
    const Query q = Query::build({"A", "B", "C"}, {{"R", {"A", "B"}}, {"S", {"B", "C"}}}, {});
    Instance<bool> inst;
    inst.relations.emplace_back(q.edge(0).attrs);
    inst.relations.emplace_back(q.edge(1).attrs);
    inst.relations[0].push_back({1, 2}, true);
    inst.relations[1].push_back({2, 3}, true);
    const auto r = evaluate(q, inst, Boolean{});
    REQUIRE(r.size() == 1);
    CHECK(r.weight(0));
    inst.relations[1] = Relation<bool>(q.edge(1).attrs);
    inst.relations[1].push_back({5, 3}, true);
    CHECK(evaluate(q, inst, Boolean{}).empty());
}

TEST_CASE("doubling finds a guess and counts every trial") {
    const auto ds = gen_star_hard(3, 3000, 1000, 4);
    const auto inst = lift<Counting>(ds.rows, true);
    EvalReport rep;
    const auto r = run_with_doubling(ds.query, inst, Counting{}, EvalOptions{}, &rep);
    CHECK(r.size() == 1000);
    CHECK(rep.doubling_trials >= 1);
    REQUIRE(rep.final_guess);
    CHECK(*rep.final_guess == 1ULL << (rep.doubling_trials - 1));
    CHECK(rep.stats.total_rows_materialized > 0);

    ExecContext outer;
    EvalOptions none;
    evaluate(ds.query, inst, Counting{}, none, nullptr, &outer);
    CHECK(outer.stats().total_rows_materialized == rep.stats.total_rows_materialized);
}

TEST_CASE("threads do not change results or totals") {
    const Query q = Query::build({"A", "B", "C", "D", "E"},
                                 {{"R", {"A", "B"}}, {"S", {"B", "C"}}, {"T", {"C", "D"}}, {"U", {"D", "E"}}},
                                 {"A", "C", "E"});
    std::mt19937_64 rng(2);
    const auto inst = fixtures::random_for<SumProduct>(q, 30, 5, rng);
    EvalOptions one;
    one.out_guess = 50;
    EvalOptions many = one;
    many.threads = 4;
    EvalReport r1, r4;
    const auto a = evaluate(q, inst, SumProduct{}, one, &r1);
    const auto b = evaluate(q, inst, SumProduct{}, many, &r4);
    CHECK(same_result(a, b));
    CHECK(r1.stats.total_rows_materialized == r4.stats.total_rows_materialized);
    CHECK(r1.stats.max_intermediate_rows == r4.stats.max_intermediate_rows);
}

TEST_CASE("input errors") {
    const Query tri = fixtures::triangle();
    Instance<std::uint64_t> inst;
    for (const auto& e : tri.edges()) inst.relations.emplace_back(e.attrs);
    CHECK_THROWS_AS(evaluate(tri, inst, Counting{}), CyclicQueryError);
    inst.relations.pop_back();
    inst.relations.pop_back();
    CHECK_THROWS_AS(evaluate(fixtures::matrix_mult(), inst, Counting{}), SchemaError);
    CHECK_THROWS_AS(parse_algorithm("fast"), PreconditionError);
    CHECK(parse_algorithm(algorithm_name(Algorithm::Line)) == Algorithm::Line);
}

TEST_CASE("instrumented evaluation reports semiring operations") {
    const auto ds = gen_star_hard(2, 2000, 400, 1);
    const auto inst = lift<Counting>(ds.rows, true);
    Instrumented<Counting> ops;
    EvalOptions opt;
    opt.out_guess = 400;
    EvalReport rep;
    evaluate(ds.query, inst, ops, opt, &rep);
    CHECK(rep.stats.semiring_ops > 0);
    CHECK(rep.stats.semiring_ops == ops.operations());
}
