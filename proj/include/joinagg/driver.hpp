#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "joinagg/hybrid.hpp"
#include "joinagg/line.hpp"
#include "joinagg/rewrite.hpp"
#include "joinagg/width.hpp"

namespace joinagg {

enum class Algorithm { Auto, Yannakakis, Line, Hybrid };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm a);

struct EvalOptions {
    Algorithm algorithm = Algorithm::Auto;
    std::optional<std::uint64_t> out_guess;
    /// ∃-components evaluated concurrently when > 1.
    int threads = 1;
    /// Root of the classic Yannakakis baseline.
    NodeId yannakakis_root = 0;
    /// KMV parameters used by `line` when no guess is given.
    int kmv_k = 64;
    int kmv_trials = 9;
    std::uint64_t kmv_seed = 1;
    /// Budget constant of the doubling wrapper.
    double doubling_c = 8;
};

struct ComponentReport {
    std::vector<std::string> relations;
    std::string algorithm;
    int fn_fhtw = 0;
    std::optional<std::uint64_t> out_guess;
    HybridReport hybrid;
    RunStats stats;
};

struct EvalReport {
    std::string algorithm;
    std::vector<ComponentReport> components;
    RunStats stats;
    int doubling_trials = 0;
    std::optional<std::uint64_t> final_guess;
};

/// Acyclicity check that carries the GYO residue in the error message.
JoinTree join_tree_or_throw(const Query& q);

/// Whether auto evaluation needs an output size guess: some cleansed ∃-component is neither
/// a single relation, free-connex, nor a line (lines estimate their own guess by KMV).
bool needs_out_guess(const Query& q);

namespace detail {

template <class S>
void record_ops(const S& ops, std::uint64_t before, RunStats& stats) {
    if constexpr (requires { ops.operations(); }) stats.semiring_ops = ops.operations() - before;
}

template <class S>
std::uint64_t ops_now(const S& ops) {
    if constexpr (requires { ops.operations(); })
        return ops.operations();
    else
        return 0;
}

template <Semiring S>
Relation<typename S::value_type> eval_component(const Query& q, const std::vector<EdgeId>& comp,
                                                const Instance<typename S::value_type>& reduced, const S& ops,
                                                const EvalOptions& opt, ComponentReport& cr, ExecContext* ctx) {
    using W = typename S::value_type;
    const Query cq = edge_subquery(q, comp);
    Instance<W> ci;
    for (EdgeId e : comp) {
        ci.relations.push_back(reduced.relations[e]);
        cr.relations.push_back(q.edge(e).name);
    }
    RewriteLog log;
    auto [cl_q, cl_inst] = cleanse(cq, std::move(ci), ops, ctx, &log);
    cr.fn_fhtw = fn_fhtw(cl_q);
    cr.out_guess = opt.out_guess;
    const AttrSet y = cq.output();

    if (cl_q.edge_count() == 1) {
        cr.algorithm = "yannakakis";
        const auto& r = cl_inst.relations.front();
        return project_aggregate(r, y & r.schema(), ops, ctx);
    }
    if (cr.fn_fhtw == 1 && opt.algorithm == Algorithm::Auto) {
        // Free-connex: Yannakakis rooted at a bag holding every output is already O(N + OUT).
        const JoinTree t = require_join_tree(cl_q);
        for (NodeId u = 0; u < t.size(); ++u) {
            if (!(y & cl_q.attrs()).subset_of(t.bag(u))) continue;
            cr.algorithm = "yannakakis";
            return yannakakis(cl_q, t, u, cl_inst, ops, ctx);
        }
    }
    const auto line = as_line_query(cl_q);
    if (opt.algorithm == Algorithm::Line && !line) throw PreconditionError("the line algorithm requires a line query");
    if (line && opt.algorithm != Algorithm::Hybrid) {
        cr.algorithm = "line";
        std::uint64_t guess;
        if (opt.out_guess) {
            guess = *opt.out_guess;
        } else {
            const double est = kmv_estimate_line(cl_q, cl_inst, opt.kmv_k, opt.kmv_trials, opt.kmv_seed);
            guess = static_cast<std::uint64_t>(std::ceil(std::max(est, 1.0)));
            cr.out_guess = guess;
        }
        return run_line(cl_q, *line, cl_inst, ops, guess, ctx);
    }
    cr.algorithm = "hybrid";
    if (!opt.out_guess) throw PreconditionError("hybrid evaluation needs an output size guess");
    auto [sep_q, sep_inst] = separate(cl_q, std::move(cl_inst), ops, log, ctx);
    auto r = hybrid_yannakakis(sep_q, sep_inst, ops, *opt.out_guess, ctx, &cr.hybrid);
    return playback(r, log);
}

/// ⋈ of the component results; scalar (empty-key) results multiply into every row.
template <Semiring S>
Relation<typename S::value_type> combine(const Query& q, std::vector<Relation<typename S::value_type>> parts,
                                         const S& ops, ExecContext* ctx) {
    using W = typename S::value_type;
    std::optional<W> scalar;
    std::vector<Relation<W>> keyed;
    for (auto& p : parts) {
        if (p.schema().empty()) {
            if (p.empty()) return Relation<W>(q.output());
            scalar = scalar ? ops.times(*scalar, p.weight(0)) : p.weight(0);
        } else {
            keyed.push_back(std::move(p));
        }
    }
    Relation<W> out;
    if (keyed.empty()) {
        out = Relation<W>(AttrSet{});
        out.push_back(static_cast<const Value*>(nullptr), ops.one());
    } else if (keyed.size() == 1) {
        out = std::move(keyed.front());
    } else {
        std::vector<Hyperedge> edges;
        Instance<W> inst;
        for (std::size_t i = 0; i < keyed.size(); ++i) {
            edges.push_back({"S" + std::to_string(i), keyed[i].schema()});
            inst.relations.push_back(std::move(keyed[i]));
        }
        AttrSet all;
        for (const auto& e : edges) all |= e.attrs;
        const Query cq = Query::from_parts(q.names(), edges, all);
        auto tree = gyo_join_tree(cq);
        if (std::holds_alternative<JoinTree>(tree)) {
            out = yannakakis(cq, std::get<JoinTree>(tree), 0, inst, ops, ctx);
        } else {
            out = std::move(inst.relations.front());
            for (std::size_t i = 1; i < inst.relations.size(); ++i) out = join(out, inst.relations[i], ops, ctx);
        }
    }
    if (scalar) {
        Relation<W> scaled(out.schema());
        scaled.reserve(out.size());
        for (std::size_t r = 0; r < out.size(); ++r) scaled.push_back(out.row(r), ops.times(out.weight(r), *scalar));
        out = std::move(scaled);
    }
    return out;
}

}  // namespace detail

template <Semiring S>
Relation<typename S::value_type> run_with_doubling(const Query& q, const Instance<typename S::value_type>& inst,
                                                   const S& ops, EvalOptions opt = {}, EvalReport* report = nullptr,
                                                   ExecContext* ctx = nullptr);

/**
 * Evaluates an acyclic join-aggregate query. `yannakakis` runs the classic baseline on a
 * GYO join tree. Otherwise: full reduction, ∃-components, cleanse, then per component the
 * Yannakakis (auto on free-connex components), the line algorithm (auto on line shapes, or
 * when requested) or separate + hybrid, playback, and a final join of the component
 * results. Without a guess, hybrid and auto on other shapes use the doubling wrapper.
 */
template <Semiring S>
Relation<typename S::value_type> evaluate(const Query& q, const Instance<typename S::value_type>& inst, const S& ops,
                                          EvalOptions opt = {}, EvalReport* report = nullptr,
                                          ExecContext* ctx = nullptr) {
    using W = typename S::value_type;
    check_instance(q, inst);
    const JoinTree t = join_tree_or_throw(q);
    if (!opt.out_guess && (opt.algorithm == Algorithm::Hybrid || (opt.algorithm == Algorithm::Auto && needs_out_guess(q))))
        return run_with_doubling(q, inst, ops, opt, report, ctx);

    EvalReport local;
    EvalReport& rep = report ? *report : local;
    rep = EvalReport{};
    rep.algorithm = algorithm_name(opt.algorithm);
    rep.final_guess = opt.out_guess;
    ExecContext own;
    ExecContext* cx = ctx ? ctx : &own;
    const RunStats before = cx->stats();
    const std::uint64_t ops_before = detail::ops_now(ops);
    auto finish = [&](Relation<W> r) {
        rep.stats = cx->stats();
        rep.stats.total_rows_materialized -= before.total_rows_materialized;
        detail::record_ops(ops, ops_before, rep.stats);
        return r;
    };

    if (opt.algorithm == Algorithm::Yannakakis) {
        if (opt.yannakakis_root < 0 || opt.yannakakis_root >= t.size())
            throw PreconditionError("yannakakis root outside the join tree");
        return finish(yannakakis(q, t, opt.yannakakis_root, inst, ops, cx));
    }

    const auto reduced = full_reducer(q, t, inst, ops, cx);
    const auto comps = exists_connected_components(q);
    rep.components.resize(comps.size());
    std::vector<Relation<W>> parts(comps.size());
    if (opt.threads > 1 && comps.size() > 1) {
        // Each component gets its own context; totals are charged to the caller's afterwards.
        std::vector<ExecContext> sub(comps.size(), ExecContext(cx->budget()));
        std::vector<std::future<Relation<W>>> futures;
        for (std::size_t i = 0; i < comps.size(); ++i)
            futures.push_back(std::async(std::launch::async, [&, i] {
                return detail::eval_component(q, comps[i], reduced, ops, opt, rep.components[i], &sub[i]);
            }));
        for (std::size_t i = 0; i < comps.size(); ++i) parts[i] = futures[i].get();
        for (std::size_t i = 0; i < comps.size(); ++i) {
            rep.components[i].stats = sub[i].stats();
            cx->note_intermediate(sub[i].stats().max_intermediate_rows);
            cx->charge(sub[i].stats().total_rows_materialized);
        }
    } else {
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const RunStats at = cx->stats();
            parts[i] = detail::eval_component(q, comps[i], reduced, ops, opt, rep.components[i], cx);
            rep.components[i].stats = cx->stats();
            rep.components[i].stats.total_rows_materialized -= at.total_rows_materialized;
        }
    }
    return finish(detail::combine(q, std::move(parts), ops, cx));
}

/**
 * Unknown OUT: runs the pipeline with guesses 1, 2, 4, ... under a row budget of
 * c·(N·g^(1−1/w) + g), w = fn-fhtw, and returns the first trial that completes.
 */
template <Semiring S>
Relation<typename S::value_type> run_with_doubling(const Query& q, const Instance<typename S::value_type>& inst,
                                                   const S& ops, EvalOptions opt, EvalReport* report,
                                                   ExecContext* ctx) {
    check_instance(q, inst);
    join_tree_or_throw(q);
    const double n = static_cast<double>(std::max<std::size_t>(inst.input_size(), 1));
    const double w = fn_fhtw(q);
    const std::uint64_t ops_before = detail::ops_now(ops);
    RunStats total;
    for (int i = 0;; ++i) {
        const std::uint64_t guess = i >= 63 ? ~0ULL : 1ULL << i;
        const double g = static_cast<double>(guess);
        const double rows = opt.doubling_c * (n * std::pow(g, 1.0 - 1.0 / w) + g);
        std::optional<std::uint64_t> budget;
        if (i < 63 && rows < 1.8e19) budget = static_cast<std::uint64_t>(std::ceil(rows));
        ExecContext trial(budget);
        EvalOptions sub = opt;
        sub.out_guess = guess;
        EvalReport sub_rep;
        try {
            auto r = evaluate(q, inst, ops, sub, &sub_rep, &trial);
            total.absorb(trial.stats());
            if (report) {
                *report = std::move(sub_rep);
                report->algorithm = algorithm_name(opt.algorithm);
                report->doubling_trials = i + 1;
                report->stats = total;
                detail::record_ops(ops, ops_before, report->stats);
            }
            if (ctx) {
                ctx->note_intermediate(total.max_intermediate_rows);
                ctx->charge(total.total_rows_materialized);
            }
            return r;
        } catch (const BudgetExceeded&) {
            total.absorb(trial.stats());
        }
    }
}

}  // namespace joinagg
