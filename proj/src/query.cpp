#include "joinagg/query.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "joinagg/error.hpp"
#include "joinagg/join_tree.hpp"

namespace joinagg {

Query Query::build(const std::vector<std::string>& attributes,
                   const std::vector<std::pair<std::string, std::vector<std::string>>>& edges,
                   const std::vector<std::string>& output) {
    if (attributes.size() > static_cast<std::size_t>(kMaxAttributes))
        throw SchemaError("at most 64 attributes are supported");
    Query q;
    q.names_ = attributes;
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (attributes[i] == attributes[j]) throw SchemaError("duplicate attribute '" + attributes[i] + "'");
    }
    auto lookup = [&](const std::string& n) {
        auto a = q.find_attribute(n);
        if (!a) throw SchemaError("unknown attribute '" + n + "'");
        return *a;
    };
    for (const auto& [name, attrs] : edges) {
        if (attrs.empty()) throw SchemaError("relation '" + name + "' has no attributes");
        Hyperedge e{name, {}};
        for (const auto& a : attrs) {
            AttrId id = lookup(a);
            if (e.attrs.contains(id))
                throw SchemaError("relation '" + name + "' repeats attribute '" + a + "'");
            e.attrs.insert(id);
        }
        q.edges_.push_back(std::move(e));
    }
    for (const auto& a : output) q.output_.insert(lookup(a));
    for (const auto& e : q.edges_) q.attrs_ |= e.attrs;
    for (AttrId a = 0; a < static_cast<AttrId>(attributes.size()); ++a)
        if (!q.attrs_.contains(a)) throw SchemaError("attribute '" + attributes[a] + "' occurs in no relation");
    q.validate();
    return q;
}

Query Query::from_parts(std::vector<std::string> names, std::vector<Hyperedge> edges, AttrSet output) {
    Query q;
    q.names_ = std::move(names);
    q.edges_ = std::move(edges);
    for (const auto& e : q.edges_) q.attrs_ |= e.attrs;
    q.output_ = output;
    q.validate();
    return q;
}

void Query::validate() const {
    if (!output_.subset_of(attrs_)) throw SchemaError("output attributes must occur in some relation");
    for (std::size_t i = 0; i < edges_.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (edges_[i].name == edges_[j].name)
                throw SchemaError("duplicate relation name '" + edges_[i].name + "'");
    for (AttrId a : attrs_)
        if (a >= static_cast<AttrId>(names_.size())) throw SchemaError("attribute id out of range");
}

std::optional<AttrId> Query::find_attribute(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<AttrId>(i);
    return std::nullopt;
}

std::optional<EdgeId> Query::find_edge(std::string_view name) const {
    for (std::size_t i = 0; i < edges_.size(); ++i)
        if (edges_[i].name == name) return static_cast<EdgeId>(i);
    return std::nullopt;
}

std::vector<EdgeId> Query::edges_containing(AttrId x) const {
    if (x < 0 || x >= kMaxAttributes || !attrs_.contains(x))
        throw SchemaError("attribute is not part of the query");
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < edge_count(); ++e)
        if (edges_[e].attrs.contains(x)) out.push_back(e);
    return out;
}

int Query::degree(AttrId x) const {
    int d = 0;
    for (const auto& e : edges_) d += e.attrs.contains(x) ? 1 : 0;
    return d;
}

AttrSet Query::unique_attrs() const {
    AttrSet seen, repeated;
    for (const auto& e : edges_) {
        repeated |= seen & e.attrs;
        seen |= e.attrs;
    }
    return seen - repeated;
}

AttrId Query::add_attribute_name(std::string name) {
    if (names_.size() >= static_cast<std::size_t>(kMaxAttributes))
        throw SchemaError("attribute table exceeds 64 entries");
    if (find_attribute(name)) throw SchemaError("attribute name '" + name + "' already in use");
    names_.push_back(std::move(name));
    return static_cast<AttrId>(names_.size() - 1);
}

std::string Query::describe_set(AttrSet s) const {
    std::string out = "{";
    bool first = true;
    for (AttrId a : s) {
        if (!first) out += ",";
        out += names_.at(a);
        first = false;
    }
    return out + "}";
}

std::string Query::to_string() const {
    std::ostringstream os;
    os << "y=" << describe_set(output_) << " E=[";
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (i) os << ", ";
        os << edges_[i].name << describe_set(edges_[i].attrs);
    }
    os << "]";
    return os.str();
}

Query induced_subquery(const Query& q, AttrSet s) {
    std::vector<Hyperedge> edges;
    for (const auto& e : q.edges()) {
        AttrSet cut = e.attrs & s;
        if (!cut.empty()) edges.push_back({e.name, cut});
    }
    return Query::from_parts(q.names(), std::move(edges), q.output() & s & q.attrs());
}

Query edge_subquery(const Query& q, const std::vector<EdgeId>& ids) {
    std::vector<Hyperedge> edges;
    AttrSet v;
    for (EdgeId e : ids) {
        edges.push_back(q.edge(e));
        v |= q.edge(e).attrs;
    }
    return Query::from_parts(q.names(), std::move(edges), q.output() & v);
}

std::vector<std::vector<EdgeId>> exists_connected_components(const Query& q) {
    const int m = q.edge_count();
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    const AttrSet non_output = q.attrs() - q.output();
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if ((q.edge(i).attrs & q.edge(j).attrs & non_output).empty() == false) parent[find(i)] = find(j);
    std::vector<std::vector<EdgeId>> comps;
    std::vector<int> slot(m, -1);
    for (int i = 0; i < m; ++i) {
        int r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        comps[slot[r]].push_back(i);
    }
    return comps;
}

namespace {

bool has_containment(const Query& q) {
    for (EdgeId i = 0; i < q.edge_count(); ++i)
        for (EdgeId j = 0; j < q.edge_count(); ++j)
            if (i != j && q.edge(i).attrs.subset_of(q.edge(j).attrs)) return true;
    return false;
}

}  // namespace

bool is_cleansed(const Query& q) {
    if (!(q.unique_attrs() - q.output()).empty()) return false;
    return !has_containment(q);
}

bool is_separated(const Query& q) {
    const AttrSet unique = q.unique_attrs();
    if (!q.output().subset_of(unique)) return false;
    if (!(unique - q.output()).empty()) return false;
    for (EdgeId i = 0; i < q.edge_count(); ++i) {
        const AttrSet e = q.edge(i).attrs;
        if (!e.intersects(q.output())) continue;
        const AttrSet core = e - q.output();
        // A relation made only of output attributes needs no host.
        if (core.empty()) continue;
        bool hosted = false;
        for (EdgeId j = 0; j < q.edge_count() && !hosted; ++j)
            hosted = j != i && core.subset_of(q.edge(j).attrs);
        if (!hosted) return false;
    }
    return true;
}

bool is_hierarchical(const Query& q) {
    std::vector<std::uint64_t> occ(kMaxAttributes, 0);
    for (EdgeId e = 0; e < q.edge_count(); ++e)
        for (AttrId a : q.edge(e).attrs) occ[a] |= std::uint64_t{1} << e;
    for (AttrId a : q.attrs())
        for (AttrId b : q.attrs()) {
            const auto x = occ[a], y = occ[b];
            const bool nested = (x & ~y) == 0 || (y & ~x) == 0;
            if (!nested && (x & y) != 0) return false;
        }
    return true;
}

bool is_a_hierarchical(const Query& q) {
    if (!is_acyclic(q)) throw CyclicQueryError("a-hierarchical check requires an acyclic query");
    const Query cleansed = plan_cleanse(q).result;
    for (const auto& comp : exists_connected_components(cleansed))
        if (!is_hierarchical(edge_subquery(cleansed, comp))) return false;
    return true;
}

CleansePlan plan_cleanse(const Query& q) {
    CleansePlan plan;
    std::vector<Hyperedge> edges = q.edges();
    AttrSet output = q.output();
    bool changed = true;
    while (changed) {
        changed = false;
        // Unique non-output attribute, lowest id first.
        AttrSet seen, repeated;
        for (const auto& e : edges) {
            repeated |= seen & e.attrs;
            seen |= e.attrs;
        }
        const AttrSet removable = seen - repeated - output;
        if (!removable.empty()) {
            const AttrId b = removable.first();
            for (EdgeId i = 0; i < static_cast<EdgeId>(edges.size()); ++i) {
                if (edges[i].attrs.contains(b)) {
                    plan.steps.push_back({CleanseStep::Kind::AggregateOut, b, i, -1});
                    edges[i].attrs.erase(b);
                    break;
                }
            }
            changed = true;
            continue;
        }
        // Contained relation, lowest id first, absorbed into the lowest-id container.
        for (EdgeId i = 0; i < static_cast<EdgeId>(edges.size()) && !changed; ++i) {
            for (EdgeId j = 0; j < static_cast<EdgeId>(edges.size()); ++j) {
                if (i != j && edges[i].attrs.subset_of(edges[j].attrs)) {
                    plan.steps.push_back({CleanseStep::Kind::Absorb, -1, i, j});
                    edges.erase(edges.begin() + i);
                    changed = true;
                    break;
                }
            }
        }
    }
    plan.result = Query::from_parts(q.names(), std::move(edges), output);
    return plan;
}

std::optional<LineShape> as_line_query(const Query& q) {
    const int k = q.edge_count();
    if (k < 2) return std::nullopt;
    for (const auto& e : q.edges())
        if (e.attrs.size() != 2) return std::nullopt;
    const AttrSet unique = q.unique_attrs();
    if (unique.size() != 2 || q.output() != unique) return std::nullopt;
    for (AttrId a : q.attrs())
        if (q.degree(a) > 2) return std::nullopt;

    LineShape shape;
    AttrId cur = unique.first();
    shape.attrs.push_back(cur);
    std::vector<bool> used(k, false);
    for (int step = 0; step < k; ++step) {
        EdgeId next = -1;
        for (EdgeId e = 0; e < k; ++e)
            if (!used[e] && q.edge(e).attrs.contains(cur)) {
                next = e;
                break;
            }
        if (next < 0) return std::nullopt;
        used[next] = true;
        shape.edges.push_back(next);
        cur = (q.edge(next).attrs - AttrSet::of(cur)).first();
        shape.attrs.push_back(cur);
    }
    if (cur != (unique - AttrSet::of(unique.first())).first()) return std::nullopt;
    return shape;
}

}  // namespace joinagg
