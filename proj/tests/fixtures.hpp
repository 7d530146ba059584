#pragma once

#include <random>
#include <type_traits>
#include <string>
#include <vector>

#include "joinagg/instance.hpp"
#include "joinagg/oracle.hpp"
#include "joinagg/query.hpp"

namespace fixtures {

using joinagg::Query;

inline Query three_arms() {
    return Query::build({"A1", "A2", "A3", "B1", "B2", "B3", "C1", "C2"},
                        {{"R1", {"A1", "B1"}},
                         {"R2", {"A2", "B2"}},
                         {"R3", {"A3", "B3"}},
                         {"R5", {"B1", "B2", "C1", "C2"}},
                         {"R6", {"B3", "C1", "C2"}}},
                        {"A1", "A2", "A3", "C2"});
}

/// The separated rewrite of three_arms (six relations).
inline Query three_arms_separated() {
    return Query::build({"A1", "A2", "A3", "A4", "B1", "B2", "B3", "B4", "C1", "C2"},
                        {{"R1", {"A1", "B1"}},
                         {"R2", {"A2", "B2"}},
                         {"R3", {"A3", "B3"}},
                         {"R4", {"A4", "B4"}},
                         {"R5", {"B1", "B2", "C1", "C2"}},
                         {"R6", {"B3", "B4", "C1", "C2"}}},
                        {"A1", "A2", "A3", "A4"});
}

inline Query matrix_mult() {
    return Query::build({"A", "B", "C"}, {{"R1", {"A", "B"}}, {"R2", {"B", "C"}}}, {"A", "C"});
}

inline Query triangle() {
    return Query::build({"A", "B", "C"}, {{"R", {"A", "B"}}, {"S", {"B", "C"}}, {"T", {"A", "C"}}}, {});
}

/// Random annotations for an instance, drawn per semiring by `draw(rng)`.
template <class W, class Draw>
joinagg::Instance<W> random_instance(const Query& q, int rows, int domain, std::mt19937_64& rng, Draw draw) {
    joinagg::Instance<W> inst;
    for (const auto& e : q.edges()) {
        joinagg::Relation<W> r(e.attrs);
        std::vector<joinagg::Value> row(e.attrs.size());
        std::vector<std::vector<joinagg::Value>> seen;
        for (int i = 0; i < rows; ++i) {
            for (auto& v : row) v = static_cast<joinagg::Value>(rng() % domain);
            bool dup = false;
            for (const auto& s : seen) dup = dup || s == row;
            if (dup) continue;
            seen.push_back(row);
            r.push_back(row.data(), draw(rng));
        }
        inst.relations.push_back(std::move(r));
    }
    return inst;
}

/// Small random annotations: zero and one included, negatives for sum-product.
template <class S>
typename S::value_type draw(std::mt19937_64& rng) {
    using joinagg::Rational;
    if constexpr (std::is_same_v<S, joinagg::Counting>) {
        return rng() % 4;
    } else if constexpr (std::is_same_v<S, joinagg::Boolean>) {
        return rng() % 4 != 0;
    } else if constexpr (std::is_same_v<S, joinagg::MaxProduct>) {
        return Rational(static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 4));
    } else {
        return Rational(static_cast<int>(rng() % 7) - 3, 1 + static_cast<int>(rng() % 3));
    }
}

template <class S>
joinagg::Instance<typename S::value_type> random_for(const Query& q, int rows, int domain, std::mt19937_64& rng) {
    return random_instance<typename S::value_type>(q, rows, domain, rng, [](std::mt19937_64& g) { return draw<S>(g); });
}

/// Same keys and annotations as the brute-force evaluation.
template <class S>
bool matches_oracle(const Query& q, const joinagg::Instance<typename S::value_type>& inst,
                    const joinagg::Relation<typename S::value_type>& got) {
    return joinagg::same_result(joinagg::brute_force(q, inst, S{}), got);
}

}  // namespace fixtures
