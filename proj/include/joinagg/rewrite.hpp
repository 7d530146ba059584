#pragma once

#include <string>
#include <utility>
#include <vector>

#include "joinagg/instance.hpp"
#include "joinagg/query.hpp"

namespace joinagg {

/// One step of the separate rewrite.
struct SeparateStep {
    enum class Kind {
        CopyAttr,     // joint output `attr` gets a unique copy `fresh` in relation `edge`
        NewRelation,  // relation `edge` hands its outputs `replaced` to a new relation keyed by `fresh`
    } kind;
    AttrId attr = -1;
    AttrId fresh = -1;
    EdgeId edge = -1;
    AttrSet replaced;
};

struct SeparatePlan {
    std::vector<SeparateStep> steps;
    Query result;
};

/**
 * Structural part of the separate rewrite for an ∃-connected, cleansed, acyclic query.
 * Each output attribute is assigned to the lowest-id relation of an optimal cover of
 * q[y] containing it; joint outputs get a copy `__xA_<attr>` there. Then every relation
 * with outputs whose non-output part no other relation contains passes its outputs to
 * a new relation `__xe_<relation>` with a fresh unique output of the same name.
 */
SeparatePlan plan_separate(const Query& q);

/// Record of the rewrites applied to one query, for mapping results back.
struct RewriteLog {
    std::vector<CleanseStep> cleanse;
    std::vector<SeparateStep> separate;
    /// For each NewRelation step, the tuples over `replaced` indexed by the fresh value.
    std::vector<std::vector<Value>> tables;
};

/// Applies the cleanse rewrite to the data; returns the cleansed query and instance.
template <Semiring S>
std::pair<Query, Instance<typename S::value_type>> cleanse(const Query& q, Instance<typename S::value_type> inst,
                                                           const S& ops, ExecContext* ctx = nullptr,
                                                           RewriteLog* log = nullptr) {
    check_instance(q, inst);
    CleansePlan plan = plan_cleanse(q);
    auto& rels = inst.relations;
    for (const auto& step : plan.steps) {
        if (step.kind == CleanseStep::Kind::AggregateOut) {
            auto& r = rels[step.edge];
            r = project_aggregate(r, r.schema() - AttrSet::of(step.attr), ops, ctx);
        } else {
            rels[step.into] = join_aggregate(rels[step.into], rels[step.edge], rels[step.into].schema(), ops, ctx);
            rels.erase(rels.begin() + step.edge);
        }
    }
    if (log) log->cleanse = plan.steps;
    return {std::move(plan.result), std::move(inst)};
}

namespace detail {

/// Copies column `from` into a new column `to` (to ∉ schema).
template <class W>
Relation<W> with_copied_column(const Relation<W>& r, AttrId from, AttrId to) {
    const AttrSet schema = r.schema() | AttrSet::of(to);
    Relation<W> out(schema);
    out.reserve(r.size());
    const int src_from = r.schema().rank(from);
    const int dst_to = schema.rank(to);
    for (std::size_t i = 0; i < r.size(); ++i) {
        Value* dst = out.append_uninitialized(r.weight(i));
        const Value* src = r.row(i);
        for (int c = 0, s = 0; c < out.arity(); ++c) dst[c] = c == dst_to ? src[src_from] : src[s++];
    }
    return out;
}

}  // namespace detail

/// Applies plan_separate to the data. Appended relations carry annotation one.
template <Semiring S>
std::pair<Query, Instance<typename S::value_type>> separate(const Query& q, Instance<typename S::value_type> inst,
                                                            const S& ops, RewriteLog& log, ExecContext* ctx = nullptr) {
    using W = typename S::value_type;
    check_instance(q, inst);
    SeparatePlan plan = plan_separate(q);
    auto& rels = inst.relations;
    for (const auto& step : plan.steps) {
        if (step.kind == SeparateStep::Kind::CopyAttr) {
            rels[step.edge] = detail::with_copied_column(rels[step.edge], step.attr, step.fresh);
            detail::materialize(ctx, rels[step.edge].size());
            log.tables.emplace_back();
        } else {
            const auto keys = project_keys(rels[step.edge], step.replaced, ops.one());
            Relation<W> fresh(step.replaced | AttrSet::of(step.fresh));
            fresh.reserve(keys.size());
            const int pos = fresh.schema().rank(step.fresh);
            for (std::size_t i = 0; i < keys.size(); ++i) {
                Value* dst = fresh.append_uninitialized(ops.one());
                const Value* src = keys.row(i);
                for (int c = 0, s = 0; c < fresh.arity(); ++c) dst[c] = c == pos ? static_cast<Value>(i) : src[s++];
            }
            detail::materialize(ctx, fresh.size());
            log.tables.push_back(keys.cells());
            rels.push_back(std::move(fresh));
        }
    }
    log.separate = plan.steps;
    return {std::move(plan.result), std::move(inst)};
}

/// Maps a result over the separated outputs back to the original output attributes.
template <class W>
Relation<W> playback(const Relation<W>& result, const RewriteLog& log) {
    Relation<W> cur = result;
    for (std::size_t k = log.separate.size(); k-- > 0;) {
        const auto& step = log.separate[k];
        const AttrSet gained = step.kind == SeparateStep::Kind::CopyAttr ? AttrSet::of(step.attr) : step.replaced;
        const AttrSet schema = (cur.schema() - AttrSet::of(step.fresh)) | gained;
        Relation<W> next(schema);
        next.reserve(cur.size());
        const int fresh_col = cur.schema().rank(step.fresh);
        const int width = gained.size();
        const auto ids = schema.ids();
        for (std::size_t i = 0; i < cur.size(); ++i) {
            const Value* src = cur.row(i);
            const Value key = src[fresh_col];
            Value* dst = next.append_uninitialized(cur.weight(i));
            for (int c = 0; c < next.arity(); ++c) {
                const AttrId a = ids[c];
                if (gained.contains(a)) {
                    dst[c] = step.kind == SeparateStep::Kind::CopyAttr
                                 ? key
                                 : log.tables[k][static_cast<std::size_t>(key) * width + gained.rank(a)];
                } else {
                    dst[c] = src[cur.schema().rank(a)];
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace joinagg
