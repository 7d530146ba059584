#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "joinagg/attr_set.hpp"

namespace joinagg {

struct Hyperedge {
    std::string name;
    AttrSet attrs;
};

using EdgeId = int;

/**
 * A join-aggregate query (V, E, y): attributes, hyperedges (relations) and output attributes.
 *
 * Attribute ids index into an attribute-name table that only ever grows, so ids stay
 * stable across rewrites (cleansing drops attributes from V, separation appends new ones).
 * Edge ids are positions in `edges()` and are only stable within one Query value.
 */
class Query {
public:
    Query() = default;

    /// Builds and validates a query; attribute names in `edges`/`output` must be declared.
    static Query build(const std::vector<std::string>& attributes,
                       const std::vector<std::pair<std::string, std::vector<std::string>>>& edges,
                       const std::vector<std::string>& output);

    /// Builds a query over an existing attribute table (used by rewrites).
    static Query from_parts(std::vector<std::string> names, std::vector<Hyperedge> edges, AttrSet output);

    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(AttrId a) const { return names_.at(a); }
    std::optional<AttrId> find_attribute(std::string_view name) const;
    std::optional<EdgeId> find_edge(std::string_view name) const;

    AttrSet attrs() const { return attrs_; }
    AttrSet output() const { return output_; }
    const std::vector<Hyperedge>& edges() const { return edges_; }
    const Hyperedge& edge(EdgeId e) const { return edges_.at(e); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    /// E_x: ids of the edges containing `x`. Throws on an attribute outside V.
    std::vector<EdgeId> edges_containing(AttrId x) const;
    int degree(AttrId x) const;
    bool is_unique(AttrId x) const { return degree(x) == 1; }
    /// Attributes of V that occur in exactly one edge.
    AttrSet unique_attrs() const;

    /// Appends a fresh attribute name to the table (not yet part of V).
    AttrId add_attribute_name(std::string name);

    std::string describe_set(AttrSet s) const;
    std::string to_string() const;

private:
    void validate() const;

    std::vector<std::string> names_;
    AttrSet attrs_;
    std::vector<Hyperedge> edges_;
    AttrSet output_;
};

/// q[S]: edges intersected with S (empty intersections dropped), output S ∩ y.
Query induced_subquery(const Query& q, AttrSet s);

/// Subquery restricted to the given edges; V is their union and y is restricted accordingly.
Query edge_subquery(const Query& q, const std::vector<EdgeId>& edges);

/// Connected components of the existential-connectivity graph (edges linked by a shared
/// non-output attribute). Each component lists edge ids in ascending order.
std::vector<std::vector<EdgeId>> exists_connected_components(const Query& q);

bool is_cleansed(const Query& q);
bool is_separated(const Query& q);
bool is_hierarchical(const Query& q);
/// Throws CyclicQueryError on cyclic input.
bool is_a_hierarchical(const Query& q);

/// One step of the cleanse rewrite.
struct CleanseStep {
    enum class Kind { AggregateOut, Absorb } kind;
    AttrId attr = -1;      // AggregateOut: the unique non-output attribute removed
    EdgeId edge = -1;      // AggregateOut: its edge; Absorb: the contained edge
    EdgeId into = -1;      // Absorb: the containing edge
};

/**
 * Structural cleanse: repeatedly aggregate out a unique non-output attribute (lowest id
 * first) or absorb a relation contained in another (lowest contained id first, into the
 * lowest containing id). Edge ids in the steps refer to the query as it is when the
 * step is applied; absorbed edges are erased from the edge list.
 */
struct CleansePlan {
    std::vector<CleanseStep> steps;
    Query result;
};

CleansePlan plan_cleanse(const Query& q);

/// A line query R1(A1,A2) ⋈ ... ⋈ Rk(Ak,Ak+1) with output {A1, Ak+1}, in path order.
struct LineShape {
    std::vector<EdgeId> edges;   // R1..Rk
    std::vector<AttrId> attrs;   // A1..Ak+1
};

/// Recognizes a line query with k >= 2 relations; either orientation is accepted and the
/// one starting at the lower-id endpoint attribute is returned.
std::optional<LineShape> as_line_query(const Query& q);

}  // namespace joinagg
