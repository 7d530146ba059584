#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "joinagg/instance.hpp"
#include "joinagg/query.hpp"

namespace joinagg {

/// R_i(A_i, B) for i = 1..k with output {A_1..A_k}.
Query star_query(int k);
/// R_i(A_i, A_{i+1}) for i = 1..k with output {A_1, A_{k+1}}.
Query line_query(int k);

/// A generated query with tuples; each row's annotation is a raw seed lifted per semiring.
struct Dataset {
    Query query;
    Instance<std::uint64_t> rows;
};

enum class Family { StarHard, LineAdversarial, RandomAcyclic, RandomLine };

struct GeneratorSpec {
    Family family = Family::StarHard;
    std::uint64_t n = 0;
    std::uint64_t out = 0;
    int k = 2;
    std::uint64_t seed = 1;
};

Family parse_family(const std::string& name);
std::string family_name(Family f);

/// Largest a with a^k <= x.
std::uint64_t integer_root(std::uint64_t x, int k);

/// Each R_i = A_i × B with ⌊OUT^{1/k}⌋ values per A_i and N/(k·⌊OUT^{1/k}⌋) values of B.
Dataset gen_star_hard(int k, std::uint64_t n, std::uint64_t out, std::uint64_t seed);

/**
 * Line query with k=3 built from two gadgets: one where rooting at the left end
 * joins n middle values against OUT/2 right values, and its mirror image. Every
 * plan of classic Yannakakis then materializes Ω(N·OUT) pairs; this is verified
 * before returning (PreconditionError if it does not hold).
 */
Dataset gen_line_adversarial(std::uint64_t n, std::uint64_t out, std::uint64_t seed);

struct RandomAcyclicSpec {
    int max_relations = 6;
    int max_arity = 5;
    int max_rows = 40;
    int domain = 3;
    std::uint64_t seed = 1;
};

/// Random join tree → relations from bags → random output subset → random rows.
Dataset gen_random_acyclic(const RandomAcyclicSpec& spec);

/// Line query with k relations over random bipartite rows; N rows total, values drawn from `domain`.
Dataset gen_random_line(int k, std::uint64_t n, std::uint64_t domain, std::uint64_t seed);

/// Deterministic annotation for a raw seed: counting 1 + seed % 5 (or 1 when `unit`), boolean
/// seed % 4 != 0, max-product (1 + seed % 10)/10, sum-product ((seed % 11) - 5)/(1 + seed % 3).
template <Semiring S>
typename S::value_type seeded_weight(std::uint64_t seed, bool unit) {
    using W = typename S::value_type;
    if (unit) return S{}.one();
    if constexpr (std::is_same_v<W, bool>) {
        return seed % 4 != 0;
    } else if constexpr (std::is_same_v<W, std::uint64_t>) {
        return 1 + seed % 5;
    } else if constexpr (std::string_view(S::name) == "maxprod") {
        return W(static_cast<int>(1 + seed % 10), 10);
    } else {
        return W(static_cast<int>(seed % 11) - 5, static_cast<int>(1 + seed % 3));
    }
}

template <Semiring S>
Instance<typename S::value_type> lift(const Instance<std::uint64_t>& rows, bool unit_weights) {
    Instance<typename S::value_type> out;
    for (const auto& r : rows.relations) {
        Relation<typename S::value_type> rel(r.schema());
        rel.reserve(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) rel.push_back(r.row(i), seeded_weight<S>(r.weight(i), unit_weights));
        out.relations.push_back(std::move(rel));
    }
    return out;
}

}  // namespace joinagg
