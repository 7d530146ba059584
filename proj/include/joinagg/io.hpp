#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "joinagg/instance.hpp"
#include "joinagg/query.hpp"

namespace joinagg {

/**
 * Maps CSV tokens to values. Canonical integers within ±2^62 are stored verbatim; other tokens are
 * interned above that range. Tokens order integers numerically before strings lexically.
 */
class Dictionary {
public:
    Value intern(std::string_view token);
    std::string token(Value v) const;
    bool less(Value a, Value b) const;

private:
    std::unordered_map<std::string, Value> ids_;
    std::vector<std::string> strings_;
};

/// Parses a query spec {"attributes": [...], "relations": [{"name", "attrs"}], "output": [...]}.
Query parse_query(std::string_view text);
Query load_query(const std::filesystem::path& path);
std::string query_to_json(const Query& q);
void save_query(const std::filesystem::path& path, const Query& q);

namespace detail {

std::vector<std::string> split_csv_line(const std::string& line);
std::string read_file(const std::filesystem::path& path);

}  // namespace detail

/**
 * Reads the CSV of relation `e`: a header naming the relation's attributes in any order,
 * optionally followed by `__w`. Missing annotations are one; duplicate tuples merge by ⊕.
 */
template <Semiring S>
Relation<typename S::value_type> read_relation_csv(std::istream& in, const Query& q, EdgeId e, Dictionary& dict,
                                                   const S& ops, const std::string& source = "relation") {
    using W = typename S::value_type;
    const AttrSet schema = q.edge(e).attrs;
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };
    if (!next_line()) throw ParseError(source + ": missing header", 1);
    const auto header = detail::split_csv_line(line);
    std::vector<int> column_of(header.size(), -1);  // output column per input column
    int weight_col = -1;
    AttrSet seen;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "__w") {
            if (weight_col >= 0) throw ParseError(source + ": duplicate __w column", lineno);
            weight_col = static_cast<int>(i);
            continue;
        }
        const auto a = q.find_attribute(header[i]);
        if (!a || !schema.contains(*a))
            throw SchemaError(source + ": column '" + header[i] + "' is not an attribute of " + q.edge(e).name);
        if (seen.contains(*a)) throw SchemaError(source + ": duplicate column '" + header[i] + "'");
        seen.insert(*a);
        column_of[i] = schema.rank(*a);
    }
    if (seen != schema) throw SchemaError(source + ": header does not cover the attributes of " + q.edge(e).name);

    Relation<W> raw(schema);
    std::vector<Value> row(schema.size());
    while (next_line()) {
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw ParseError(source + ": expected " + std::to_string(header.size()) + " fields", lineno);
        W w = ops.one();
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (static_cast<int>(i) == weight_col) {
                try {
                    w = S::parse(cells[i]);
                } catch (const std::exception& ex) {
                    throw ParseError(source + ": bad annotation '" + cells[i] + "': " + ex.what(), lineno);
                }
            } else {
                row[column_of[i]] = dict.intern(cells[i]);
            }
        }
        raw.push_back(row.data(), std::move(w));
    }
    return normalize(raw, ops);
}

template <Semiring S>
Relation<typename S::value_type> load_relation(const std::filesystem::path& path, const Query& q, EdgeId e,
                                               Dictionary& dict, const S& ops) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path.string());
    return read_relation_csv(in, q, e, dict, ops, path.filename().string());
}

/// Loads <dir>/<relation name>.csv for every relation.
template <Semiring S>
Instance<typename S::value_type> load_instance(const std::filesystem::path& dir, const Query& q, Dictionary& dict,
                                               const S& ops) {
    Instance<typename S::value_type> inst;
    for (EdgeId e = 0; e < q.edge_count(); ++e)
        inst.relations.push_back(load_relation(dir / (q.edge(e).name + ".csv"), q, e, dict, ops));
    return inst;
}

/// Header in attribute-id order plus `__w`; rows sorted by token order.
template <Semiring S>
void write_relation_csv(std::ostream& out, const Query& q, const Relation<typename S::value_type>& r,
                        const Dictionary& dict) {
    const auto ids = r.schema().ids();
    for (AttrId a : ids) out << q.name(a) << ',';
    out << "__w\n";
    std::vector<std::size_t> order(r.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const Value* a = r.row(x);
        const Value* b = r.row(y);
        for (int c = 0; c < r.arity(); ++c) {
            if (dict.less(a[c], b[c])) return true;
            if (dict.less(b[c], a[c])) return false;
        }
        return false;
    });
    for (std::size_t i : order) {
        const Value* row = r.row(i);
        for (int c = 0; c < r.arity(); ++c) out << dict.token(row[c]) << ',';
        out << S::format(r.weight(i)) << '\n';
    }
}

template <Semiring S>
void save_relation(const std::filesystem::path& path, const Query& q, const Relation<typename S::value_type>& r,
                   const Dictionary& dict) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path.string());
    write_relation_csv<S>(out, q, r, dict);
}

}  // namespace joinagg
