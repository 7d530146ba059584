#include "joinagg/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "joinagg/semiring.hpp"
#include "joinagg/yannakakis.hpp"

namespace joinagg {

Query star_query(int k) {
    if (k < 1) throw PreconditionError("star query needs k >= 1");
    std::vector<std::string> attrs, out;
    std::vector<std::pair<std::string, std::vector<std::string>>> edges;
    for (int i = 1; i <= k; ++i) {
        attrs.push_back("A" + std::to_string(i));
        out.push_back(attrs.back());
    }
    attrs.push_back("B");
    for (int i = 1; i <= k; ++i) edges.push_back({"R" + std::to_string(i), {"A" + std::to_string(i), "B"}});
    return Query::build(attrs, edges, out);
}

Query line_query(int k) {
    if (k < 1) throw PreconditionError("line query needs k >= 1");
    std::vector<std::string> attrs;
    std::vector<std::pair<std::string, std::vector<std::string>>> edges;
    for (int i = 1; i <= k + 1; ++i) attrs.push_back("A" + std::to_string(i));
    for (int i = 1; i <= k; ++i)
        edges.push_back({"R" + std::to_string(i), {"A" + std::to_string(i), "A" + std::to_string(i + 1)}});
    return Query::build(attrs, edges, {"A1", "A" + std::to_string(k + 1)});
}

Family parse_family(const std::string& name) {
    if (name == "star_hard") return Family::StarHard;
    if (name == "line_adversarial") return Family::LineAdversarial;
    if (name == "random_acyclic") return Family::RandomAcyclic;
    if (name == "random_line") return Family::RandomLine;
    throw PreconditionError("unknown generator family '" + name + "'");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::StarHard: return "star_hard";
        case Family::LineAdversarial: return "line_adversarial";
        case Family::RandomAcyclic: return "random_acyclic";
        case Family::RandomLine: return "random_line";
    }
    return "?";
}

std::uint64_t integer_root(std::uint64_t x, int k) {
    if (k <= 0) throw PreconditionError("root degree must be positive");
    if (x == 0) return 0;
    auto pow_le = [&](std::uint64_t a) {
        // a^k <= x without overflow
        std::uint64_t acc = 1;
        for (int i = 0; i < k; ++i) {
            if (acc > x / a) return false;
            acc *= a;
        }
        return acc <= x;
    };
    auto a = static_cast<std::uint64_t>(std::pow(static_cast<double>(x), 1.0 / k));
    while (a > 1 && !pow_le(a)) --a;
    while (pow_le(a + 1)) ++a;
    return std::max<std::uint64_t>(a, 1);
}

Dataset gen_star_hard(int k, std::uint64_t n, std::uint64_t out, std::uint64_t seed) {
    if (k < 1 || out < 1) throw PreconditionError("star_hard needs k >= 1 and OUT >= 1");
    const std::uint64_t a = integer_root(out, k);
    const std::uint64_t b = n / (static_cast<std::uint64_t>(k) * a);
    if (b < 1) throw PreconditionError("star_hard: N is too small for the requested OUT");
    std::mt19937_64 rng(seed);
    Dataset d{star_query(k), {}};
    for (int i = 0; i < k; ++i) {
        Relation<std::uint64_t> r(d.query.edge(i).attrs);
        r.reserve(a * b);
        // Columns follow attribute ids: A_i first, then B.
        for (std::uint64_t x = 0; x < a; ++x)
            for (std::uint64_t y = 0; y < b; ++y) r.push_back({static_cast<Value>(x), static_cast<Value>(y)}, rng());
        d.rows.relations.push_back(std::move(r));
    }
    return d;
}

Dataset gen_line_adversarial(std::uint64_t n, std::uint64_t out, std::uint64_t seed) {
    if (out < 2) throw PreconditionError("line_adversarial needs OUT >= 2");
    if (5 * out > n) throw PreconditionError("line_adversarial needs OUT <= N/5");
    if (static_cast<double>(n) < 100.0 * std::sqrt(static_cast<double>(out)))
        throw PreconditionError("line_adversarial needs N >= 100*sqrt(OUT)");
    const std::uint64_t mid = (n - out) / 4;
    const std::uint64_t m = out / 2, p = out - m;
    std::mt19937_64 rng(seed);
    Dataset d{line_query(3), {}};
    Relation<std::uint64_t> r1(d.query.edge(0).attrs), r2(d.query.edge(1).attrs), r3(d.query.edge(2).attrs);
    auto v = [](std::uint64_t x) { return static_cast<Value>(x); };
    // Left gadget: one A1 value fans out to `mid` A2 values that all meet a single A3
    // value, which fans out to m A4 values. Plans rooted left or in the middle pay mid*m.
    for (std::uint64_t j = 0; j < mid; ++j) r1.push_back({0, v(j)}, rng());
    for (std::uint64_t j = 0; j < mid; ++j) r2.push_back({v(j), 0}, rng());
    for (std::uint64_t j = 0; j < m; ++j) r3.push_back({0, v(j)}, rng());
    // Right gadget, mirrored: p A1 values meet one A2 value that fans out to `mid` A3
    // values, all leading to one A4 value. Plans rooted right pay p*mid.
    for (std::uint64_t i = 0; i < p; ++i) r1.push_back({v(1 + i), v(mid)}, rng());
    for (std::uint64_t j = 0; j < mid; ++j) r2.push_back({v(mid), v(1 + j)}, rng());
    for (std::uint64_t j = 0; j < mid; ++j) r3.push_back({v(1 + j), v(m)}, rng());
    d.rows.relations = {std::move(r1), std::move(r2), std::move(r3)};

    const auto inst = lift<Counting>(d.rows, true);
    const JoinTree t = require_join_tree(d.query);
    const double need = 0.1 * static_cast<double>(d.rows.input_size()) * static_cast<double>(out);
    for (NodeId root = 0; root < t.size(); ++root) {
        ExecContext ctx;
        yannakakis(d.query, t, root, inst, Counting{}, &ctx);
        if (static_cast<double>(ctx.stats().max_intermediate_rows) < need)
            throw PreconditionError("line_adversarial: instance does not force large intermediates");
    }
    return d;
}

Dataset gen_random_acyclic(const RandomAcyclicSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    auto coin = [&](int percent) { return static_cast<int>(rng() % 100) < percent; };
    const int rels = 1 + static_cast<int>(rng() % spec.max_relations);
    std::vector<std::vector<int>> rel_attrs;
    int next_attr = 0;
    for (int i = 0; i < rels; ++i) {
        std::vector<int> attrs;
        if (i > 0) {
            const auto& parent = rel_attrs[rng() % i];
            for (int a : parent)
                if (coin(50) && static_cast<int>(attrs.size()) < spec.max_arity) attrs.push_back(a);
            if (attrs.empty() && coin(85)) attrs.push_back(parent[rng() % parent.size()]);
        }
        int room = spec.max_arity - static_cast<int>(attrs.size());
        int fresh = room > 0 ? static_cast<int>(rng() % (room + 1)) : 0;
        if (!attrs.empty() && coin(15)) fresh = 0;
        if (attrs.empty() && fresh == 0) fresh = 1;
        for (int f = 0; f < fresh; ++f) attrs.push_back(next_attr++);
        std::sort(attrs.begin(), attrs.end());
        rel_attrs.push_back(attrs);
    }

    std::vector<std::string> names;
    std::vector<std::string> out;
    for (int a = 0; a < next_attr; ++a) {
        names.push_back("X" + std::to_string(a));
        if (coin(40)) out.push_back(names.back());
    }
    std::vector<std::pair<std::string, std::vector<std::string>>> edges;
    for (int i = 0; i < rels; ++i) {
        std::vector<std::string> an;
        for (int a : rel_attrs[i]) an.push_back(names[a]);
        edges.push_back({"R" + std::to_string(i), an});
    }
    Dataset d{Query::build(names, edges, out), {}};
    for (int i = 0; i < rels; ++i) {
        Relation<std::uint64_t> r(d.query.edge(i).attrs);
        const int rows = 1 + static_cast<int>(rng() % spec.max_rows);
        std::set<std::vector<Value>> seen;
        std::vector<Value> row(r.arity());
        for (int j = 0; j < rows; ++j) {
            for (auto& x : row) x = static_cast<Value>(rng() % spec.domain);
            if (seen.insert(row).second) r.push_back(row.data(), rng());
        }
        d.rows.relations.push_back(std::move(r));
    }
    return d;
}

Dataset gen_random_line(int k, std::uint64_t n, std::uint64_t domain, std::uint64_t seed) {
    if (k < 2 || domain < 1) throw PreconditionError("random_line needs k >= 2 and a positive domain");
    std::mt19937_64 rng(seed);
    Dataset d{line_query(k), {}};
    const std::uint64_t per = std::max<std::uint64_t>(1, n / k);
    for (int i = 0; i < k; ++i) {
        Relation<std::uint64_t> r(d.query.edge(i).attrs);
        std::set<std::pair<Value, Value>> seen;
        for (std::uint64_t j = 0; j < per * 4 && seen.size() < per; ++j) {
            const Value x = static_cast<Value>(rng() % domain), y = static_cast<Value>(rng() % domain);
            if (seen.insert({x, y}).second) r.push_back({x, y}, rng());
        }
        d.rows.relations.push_back(std::move(r));
    }
    return d;
}

}  // namespace joinagg
