#include "joinagg/io.hpp"

#include <charconv>

#include <json.hpp>

namespace joinagg {

namespace {

constexpr Value kStringBase = Value{1} << 62;

int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "token" used as a value rather than a relation name.
int line_of_reference(std::string_view text, const std::string& token) {
    const std::string quoted = "\"" + token + "\"";
    for (std::size_t pos = text.find(quoted); pos != std::string_view::npos; pos = text.find(quoted, pos + 1)) {
        std::size_t back = pos;
        while (back > 0 && (text[back - 1] == ' ' || text[back - 1] == '\t' || text[back - 1] == '\n')) --back;
        if (back > 0 && text[back - 1] == ':') {
            // "name": "token" is a relation name, not a reference.
            const auto key = text.rfind("\"name\"", back);
            if (key != std::string_view::npos && text.substr(key, back - key).find(',') == std::string_view::npos)
                continue;
        }
        return line_of_offset(text, pos);
    }
    return 0;
}

}  // namespace

Value Dictionary::intern(std::string_view token) {
    Value v = 0;
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (ec == std::errc() && ptr == end && !token.empty() && v < kStringBase && v > -kStringBase &&
        std::to_string(v) == token)
        return v;
    auto it = ids_.find(std::string(token));
    if (it != ids_.end()) return it->second;
    const Value id = kStringBase + static_cast<Value>(strings_.size());
    strings_.emplace_back(token);
    ids_.emplace(strings_.back(), id);
    return id;
}

std::string Dictionary::token(Value v) const {
    if (v >= kStringBase) return strings_.at(static_cast<std::size_t>(v - kStringBase));
    return std::to_string(v);
}

bool Dictionary::less(Value a, Value b) const {
    const bool sa = a >= kStringBase, sb = b >= kStringBase;
    if (sa != sb) return sb;
    if (!sa) return a < b;
    return token(a) < token(b);
}

Query parse_query(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& ex) {
        throw ParseError(std::string("malformed query spec: ") + ex.what(), line_of_offset(text, ex.byte > 0 ? ex.byte - 1 : 0));
    }
    auto names_of = [&](const nlohmann::json& arr, const std::string& where) {
        if (!arr.is_array()) throw ParseError("'" + where + "' must be an array of names");
        std::vector<std::string> out;
        for (const auto& x : arr) {
            if (!x.is_string()) throw ParseError("'" + where + "' must contain only strings");
            out.push_back(x.get<std::string>());
        }
        return out;
    };
    if (!j.is_object()) throw ParseError("query spec must be an object", 1);
    for (const char* key : {"attributes", "relations", "output"})
        if (!j.contains(key)) throw ParseError(std::string("query spec lacks '") + key + "'");
    const auto attributes = names_of(j["attributes"], "attributes");
    std::vector<std::pair<std::string, std::vector<std::string>>> edges;
    if (!j["relations"].is_array()) throw ParseError("'relations' must be an array");
    for (const auto& r : j["relations"]) {
        if (!r.is_object() || !r.contains("name") || !r["name"].is_string() || !r.contains("attrs"))
            throw ParseError("each relation needs a string 'name' and an 'attrs' array");
        edges.emplace_back(r["name"].get<std::string>(), names_of(r["attrs"], "attrs"));
    }
    const auto output = names_of(j["output"], "output");

    // Unknown references get the line where they first appear.
    std::unordered_map<std::string, bool> declared;
    for (const auto& a : attributes) declared[a] = true;
    auto check = [&](const std::string& name) {
        if (!declared.count(name))
            throw ParseError("unknown attribute '" + name + "'", line_of_reference(text, name));
    };
    for (const auto& [name, attrs] : edges)
        for (const auto& a : attrs) check(a);
    for (const auto& a : output) check(a);
    try {
        return Query::build(attributes, edges, output);
    } catch (const SchemaError& ex) {
        throw ParseError(ex.what());
    }
}

Query load_query(const std::filesystem::path& path) { return parse_query(detail::read_file(path)); }

std::string query_to_json(const Query& q) {
    nlohmann::ordered_json j;
    std::vector<std::string> attrs;
    for (AttrId a : q.attrs()) attrs.push_back(q.name(a));
    j["attributes"] = attrs;
    j["relations"] = nlohmann::ordered_json::array();
    for (const auto& e : q.edges()) {
        std::vector<std::string> names;
        for (AttrId a : e.attrs) names.push_back(q.name(a));
        j["relations"].push_back({{"name", e.name}, {"attrs", names}});
    }
    std::vector<std::string> out;
    for (AttrId a : q.output()) out.push_back(q.name(a));
    j["output"] = out;
    return j.dump(2) + "\n";
}

void save_query(const std::filesystem::path& path, const Query& q) {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write " + path.string());
    out << query_to_json(q);
}

namespace detail {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    for (auto& s : out) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

}  // namespace joinagg
