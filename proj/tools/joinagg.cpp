#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "joinagg/bench.hpp"
#include "joinagg/driver.hpp"
#include "joinagg/io.hpp"

using namespace joinagg;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kOther = 1, kUsage = 2, kParse = 3, kSchema = 4, kCyclic = 5, kPrecondition = 6, kBudget = 7,
            kInvariant = 8 };

struct RunArgs {
    std::string query_file;
    std::string data_dir;
    std::string semiring = "counting";
    std::string algorithm = "auto";
    std::optional<std::uint64_t> out_guess;
    bool stats = false;
    bool trace = false;
    int threads = 1;
    std::string report_path;
    std::string output_path;
};

ordered_json stats_json(const RunStats& s) {
    return {{"max_intermediate_rows", s.max_intermediate_rows},
            {"total_rows_materialized", s.total_rows_materialized},
            {"semiring_ops", s.semiring_ops}};
}

template <Semiring S>
int run_with(const RunArgs& a) {
    const Query q = load_query(a.query_file);
    join_tree_or_throw(q);
    const WidthReport width = analyze(q);
    Dictionary dict;
    Instrumented<S> ops;
    const auto inst = load_instance(a.data_dir, q, dict, ops);
    EvalOptions opt;
    opt.algorithm = parse_algorithm(a.algorithm);
    opt.out_guess = a.out_guess;
    opt.threads = a.threads;
    EvalReport rep;
    const auto start = std::chrono::steady_clock::now();
    const auto result = evaluate(q, inst, ops, opt, &rep);
    const double wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (a.output_path.empty()) {
        write_relation_csv<S>(std::cout, q, result, dict);
    } else {
        save_relation<S>(a.output_path, q, result, dict);
    }

    ordered_json j;
    j["classification"] = ordered_json::parse(width.to_json(q));
    j["semiring"] = S::name;
    j["algorithm"] = rep.algorithm;
    j["OUT"] = result.size();
    j["stats"] = stats_json(rep.stats);
    j["wall_ms"] = wall_ms;
    j["output"] = a.output_path.empty() ? "-" : a.output_path;
    j["doubling_trials"] = rep.doubling_trials;
    j["final_guess"] = rep.final_guess ? ordered_json(*rep.final_guess) : ordered_json(nullptr);
    ordered_json comps = ordered_json::array();
    std::vector<std::string> trace;
    for (const auto& c : rep.components) {
        ordered_json cj;
        cj["relations"] = c.relations;
        cj["algorithm"] = c.algorithm;
        cj["fn_fhtw"] = c.fn_fhtw;
        cj["out_guess"] = c.out_guess ? ordered_json(*c.out_guess) : ordered_json(nullptr);
        cj["stats"] = {{"max_intermediate_rows", c.stats.max_intermediate_rows},
                       {"total_rows_materialized", c.stats.total_rows_materialized}};
        if (c.algorithm == "hybrid")
            cj["hybrid"] = {{"width", c.hybrid.width},         {"tree_nodes", c.hybrid.tree_nodes},
                            {"iterations", c.hybrid.iterations}, {"splits", c.hybrid.splits},
                            {"finalized", c.hybrid.finalized},   {"empty_tasks", c.hybrid.empty_tasks}};
        comps.push_back(std::move(cj));
        trace.insert(trace.end(), c.hybrid.trace.begin(), c.hybrid.trace.end());
    }
    j["components"] = std::move(comps);
    if (a.trace) j["trace"] = trace;

    if (!a.report_path.empty()) {
        std::ofstream out(a.report_path);
        if (!out) throw SchemaError("cannot write " + a.report_path);
        out << j.dump(2) << '\n';
    } else if (a.stats || a.trace) {
        std::cerr << j.dump(2) << '\n';
    }
    return kOk;
}

int cmd_run(const RunArgs& a) {
    if (a.semiring == "counting") return run_with<Counting>(a);
    if (a.semiring == "boolean") return run_with<Boolean>(a);
    if (a.semiring == "maxprod") return run_with<MaxProduct>(a);
    if (a.semiring == "sumprod") return run_with<SumProduct>(a);
    throw PreconditionError("unknown semiring '" + a.semiring + "'");
}

int cmd_analyze(const std::string& file) {
    const Query q = load_query(file);
    std::cout << analyze(q).to_json(q) << '\n';
    return kOk;
}

struct GenArgs {
    std::string family = "star_hard";
    int k = 2;
    std::uint64_t n = 1000;
    std::uint64_t out = 100;
    std::uint64_t seed = 1;
    std::uint64_t domain = 0;
    std::string dir;
    std::string semiring = "counting";
    bool seeded_weights = false;
};

template <Semiring S>
void write_dataset(const Dataset& ds, const fs::path& dir, bool unit) {
    fs::create_directories(dir);
    save_query(dir / "query.json", ds.query);
    const auto inst = lift<S>(ds.rows, unit);
    const bool weights = !unit || !std::is_same_v<S, Counting>;
    for (EdgeId e = 0; e < ds.query.edge_count(); ++e) {
        const auto& r = inst.relations[e];
        std::ofstream out(dir / (ds.query.edge(e).name + ".csv"));
        if (!out) throw SchemaError("cannot write " + (dir / (ds.query.edge(e).name + ".csv")).string());
        const auto ids = r.schema().ids();
        for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ds.query.name(ids[i]);
        if (weights) out << ",__w";
        out << '\n';
        for (std::size_t i = 0; i < r.size(); ++i) {
            for (int c = 0; c < r.arity(); ++c) out << (c ? "," : "") << r.row(i)[c];
            if (weights) out << ',' << S::format(r.weight(i));
            out << '\n';
        }
    }
}

std::uint64_t env_seed(std::uint64_t fallback) {
    const char* s = std::getenv("JOINAGG_SEED");
    if (!s || !*s) return fallback;
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ParseError(std::string("JOINAGG_SEED is not an integer: ") + s);
    }
}

Dataset generate(Family f, int k, std::uint64_t n, std::uint64_t out, std::uint64_t seed, std::uint64_t domain) {
    switch (f) {
        case Family::StarHard: return gen_star_hard(k, n, out, seed);
        case Family::LineAdversarial: return gen_line_adversarial(n, out, seed);
        case Family::RandomLine: return gen_random_line(k, n, domain ? domain : std::max<std::uint64_t>(2, n / 10), seed);
        case Family::RandomAcyclic: {
            RandomAcyclicSpec spec;
            spec.seed = seed;
            if (n) spec.max_rows = static_cast<int>(n);
            if (domain) spec.domain = static_cast<int>(domain);
            return gen_random_acyclic(spec);
        }
    }
    throw PreconditionError("unknown family");
}

int cmd_gen(GenArgs a) {
    a.seed = env_seed(a.seed);
    const Dataset ds = generate(parse_family(a.family), a.k, a.n, a.out, a.seed, a.domain);
    const bool unit = !a.seeded_weights;
    if (a.semiring == "counting") write_dataset<Counting>(ds, a.dir, unit);
    else if (a.semiring == "boolean") write_dataset<Boolean>(ds, a.dir, unit);
    else if (a.semiring == "maxprod") write_dataset<MaxProduct>(ds, a.dir, unit);
    else if (a.semiring == "sumprod") write_dataset<SumProduct>(ds, a.dir, unit);
    else throw PreconditionError("unknown semiring '" + a.semiring + "'");
    std::cerr << "wrote " << ds.query.edge_count() << " relations, " << ds.rows.input_size() << " rows to " << a.dir
              << '\n';
    return kOk;
}

// {"seed": 1, "cases": [{"family", "k", "n", "out": [...], "algorithms": [...], "guess": "true"|"none"}]}
int cmd_bench(const std::string& spec_file, const std::string& output) {
    ordered_json spec;
    try {
        spec = ordered_json::parse(detail::read_file(spec_file));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(spec_file + ": " + e.what());
    }
    const std::uint64_t seed = env_seed(spec.value("seed", std::uint64_t{1}));
    std::ofstream file;
    if (!output.empty()) {
        file.open(output);
        if (!file) throw SchemaError("cannot write " + output);
    }
    std::ostream& out = output.empty() ? std::cout : file;
    out << bench_csv_header() << '\n';
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
    try {
        for (const auto& c : spec.at("cases")) {
            const std::string family = c.at("family").get<std::string>();
            const Family f = parse_family(family);
            const int k = c.value("k", 2);
            const std::uint64_t n = c.at("n").get<std::uint64_t>();
            const bool true_guess = c.value("guess", std::string("true")) == "true";
            for (const auto& target : c.at("out")) {
                const Dataset ds = generate(f, k, n, target.get<std::uint64_t>(), seed, 0);
                const std::uint64_t real_out = true_guess ? output_size(ds) : 0;
                for (const auto& alg : c.at("algorithms")) {
                    const Algorithm algorithm = parse_algorithm(alg.get<std::string>());
                    std::optional<std::uint64_t> guess;
                    if (true_guess) guess = std::max<std::uint64_t>(real_out, 1);
                    const BenchRow row = bench_run(ds, family, k, algorithm, guess);
                    out << bench_csv_line(row) << '\n';
                    auto& s = series[family + " k=" + std::to_string(k) + " " + row.algorithm];
                    s.first.push_back(static_cast<double>(std::max<std::uint64_t>(row.out, 1)));
                    s.second.push_back(static_cast<double>(std::max<std::uint64_t>(row.max_intermediate_rows, 1)));
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(spec_file + ": " + e.what());
    }
    for (const auto& [name, s] : series) {
        if (s.first.size() < 2) continue;
        try {
            std::cerr << name << ": slope " << loglog_slope(s.first, s.second) << '\n';
        } catch (const PreconditionError&) {
            std::cerr << name << ": slope undefined\n";
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Join-aggregate queries over commutative semirings"};
    app.require_subcommand(1);

    std::string analyze_file;
    auto* analyze_cmd = app.add_subcommand("analyze", "Classify a query and report its widths");
    analyze_cmd->add_option("query", analyze_file, "query spec JSON")->required();

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Evaluate a query over CSV relations");
    run_cmd->add_option("query", run.query_file, "query spec JSON")->required();
    run_cmd->add_option("data", run.data_dir, "directory with <relation>.csv")->required();
    run_cmd->add_option("--semiring", run.semiring)->check(CLI::IsMember({"counting", "boolean", "maxprod", "sumprod"}));
    run_cmd->add_option("--algorithm", run.algorithm)->check(CLI::IsMember({"auto", "yannakakis", "line", "hybrid"}));
    run_cmd->add_option("--out-guess", run.out_guess);
    run_cmd->add_flag("--stats", run.stats, "print the run report to stderr");
    run_cmd->add_flag("--trace", run.trace, "include the partition trace in the report");
    run_cmd->add_option("--threads", run.threads)->check(CLI::PositiveNumber);
    run_cmd->add_option("--report", run.report_path, "write the run report here");
    run_cmd->add_option("--output", run.output_path, "write the result CSV here instead of stdout");

    std::string bench_spec, bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "Run a scaling sweep");
    bench_cmd->add_option("spec", bench_spec, "bench spec JSON")->required();
    bench_cmd->add_option("--output", bench_out, "CSV path (default stdout)");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write a generated dataset");
    gen_cmd->add_option("--family", gen.family)
        ->check(CLI::IsMember({"star_hard", "line_adversarial", "random_acyclic", "random_line"}));
    gen_cmd->add_option("--k", gen.k);
    gen_cmd->add_option("--n", gen.n);
    gen_cmd->add_option("--out", gen.out);
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--domain", gen.domain, "value domain for random families");
    gen_cmd->add_option("--dir", gen.dir)->required();
    gen_cmd->add_option("--semiring", gen.semiring)->check(CLI::IsMember({"counting", "boolean", "maxprod", "sumprod"}));
    gen_cmd->add_flag("--seeded-weights", gen.seeded_weights, "derive annotations from row seeds instead of one");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*analyze_cmd) return cmd_analyze(analyze_file);
        if (*run_cmd) return cmd_run(run);
        if (*bench_cmd) return cmd_bench(bench_spec, bench_out);
        if (*gen_cmd) return cmd_gen(gen);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return kSchema;
    } catch (const CyclicQueryError& e) {
        std::cerr << "cyclic query: " << e.what() << '\n';
        return kCyclic;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition: " << e.what() << '\n';
        return kPrecondition;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kBudget;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violated: " << e.what() << '\n';
        return kInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
    return kOther;
}
