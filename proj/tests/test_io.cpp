#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "joinagg/io.hpp"

using namespace joinagg;

namespace {

const char* kStarSpec = R"({
  "attributes": ["A", "B", "C"],
  "relations": [
    {"name": "R", "attrs": ["A", "B"]},
    {"name": "S", "attrs": ["C", "B"]}
  ],
  "output": ["A", "C"]
})";

}  // namespace

TEST_CASE("query spec parsing") {
    const Query q = parse_query(kStarSpec);
    CHECK(q.edge_count() == 2);
    CHECK(q.edge(1).name == "S");
    CHECK(q.output() == (AttrSet::of(0) | AttrSet::of(2)));
    const Query back = parse_query(query_to_json(q));
    CHECK(back.to_string() == q.to_string());
}

TEST_CASE("parse errors carry the line") {
    const std::string bad = R"({
  "attributes": ["A", "B"],
  "relations": [
    {"name": "R", "attrs": ["A", "B"]},
    {"name": "S", "attrs": ["B", "Z"]}
  ],
  "output": ["A"]
})";
    try {
        parse_query(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
        CHECK(std::string(e.what()).find("'Z'") != std::string::npos);
    }

    // A relation named like the missing attribute is not the reference.
    const std::string shadow = R"({
  "attributes": ["A"],
  "relations": [
    {"name": "Z", "attrs": ["A"]}
  ],
  "output": ["Z"]
})";
    try {
        parse_query(shadow);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 6);
    }

    CHECK_THROWS_AS(parse_query("{\"attributes\": [\"A\"],\n \"relations\": [}"), ParseError);
    CHECK_THROWS_AS(parse_query(R"({"attributes": ["A"], "relations": []})"), ParseError);
    CHECK_THROWS_AS(parse_query(R"({"attributes": ["A"], "relations": [{"name": "R", "attrs": ["A"]}], "output": [1]})"),
                    ParseError);
}

TEST_CASE("relation CSV reading") {
    const Query q = parse_query(kStarSpec);
    Dictionary dict;
    std::istringstream in("B,C,__w\n1,x,2\n1,y,3\n\n1,x,4\n");
    const auto r = read_relation_csv(in, q, 1, dict, Counting{});
    REQUIRE(r.size() == 2);
    // Columns follow attribute ids: B then C.
    const auto s = sorted(r);
    CHECK(dict.token(s.row(0)[1]) == "x");
    CHECK(s.weight(0) == 6);

    std::istringstream plain("A,B\n1,2\n3,2\n");
    const auto p = read_relation_csv(plain, q, 0, dict, Counting{});
    CHECK(p.size() == 2);
    CHECK(p.weight(0) == 1);

    std::istringstream wrong("A,C\n1,2\n");
    CHECK_THROWS_AS(read_relation_csv(wrong, q, 0, dict, Counting{}), SchemaError);
    std::istringstream ragged("A,B\n1\n");
    try {
        read_relation_csv(ragged, q, 0, dict, Counting{});
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    std::istringstream bad_w("A,B,__w\n1,2,-1\n");
    CHECK_THROWS_AS(read_relation_csv(bad_w, q, 0, dict, Counting{}), ParseError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_relation_csv(empty, q, 0, dict, Counting{}), ParseError);
}

TEST_CASE("dictionary ordering") {
    Dictionary dict;
    const Value ten = dict.intern("10"), two = dict.intern("2"), neg = dict.intern("-3");
    const Value b = dict.intern("b"), a = dict.intern("a");
    CHECK(ten == 10);
    CHECK(neg == -3);
    CHECK(dict.less(neg, two));
    CHECK(dict.less(two, ten));
    CHECK(dict.less(ten, a));
    CHECK(dict.less(a, b));
    CHECK(dict.intern("a") == a);
    CHECK(dict.token(b) == "b");
    CHECK(dict.intern("007") != 7);
}

TEST_CASE("result CSV writing is sorted and round-trips") {
    const Query q = parse_query(kStarSpec);
    Dictionary dict;
    Relation<Rational> r(q.output());
    r.push_back({dict.intern("b"), 2}, Rational(1, 2));
    r.push_back({dict.intern("a"), 10}, Rational(3));
    r.push_back({dict.intern("a"), 9}, Rational(-1, 3));
    std::ostringstream out;
    write_relation_csv<SumProduct>(out, q, r, dict);
    CHECK(out.str() == "A,C,__w\na,9,-1/3\na,10,3\nb,2,1/2\n");

    const auto dir = std::filesystem::temp_directory_path() / "joinagg_io_test";
    std::filesystem::create_directories(dir);
    save_query(dir / "query.json", q);
    CHECK(load_query(dir / "query.json").to_string() == q.to_string());
    {
        std::ofstream f(dir / "R.csv");
        f << "A,B\n1,1\n2,1\n";
    }
    {
        std::ofstream f(dir / "S.csv");
        f << "C,B,__w\n5,1,2\n";
    }
    const auto inst = load_instance(dir, q, dict, Counting{});
    CHECK(inst.input_size() == 3);
    std::filesystem::remove(dir / "S.csv");
    CHECK_THROWS_AS(load_instance(dir, q, dict, Counting{}), SchemaError);
    std::filesystem::remove_all(dir);
}
