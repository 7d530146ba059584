#include "joinagg/bench.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace joinagg {

std::string bench_csv_header() {
    return "family,k,N,OUT,algorithm,max_intermediate_rows,total_rows_materialized,semiring_ops,wall_ms,doubling_trials";
}

std::string bench_csv_line(const BenchRow& r) {
    std::ostringstream os;
    os << r.family << ',' << r.k << ',' << r.n << ',' << r.out << ',' << r.algorithm << ',' << r.max_intermediate_rows
       << ',' << r.total_rows_materialized << ',' << r.semiring_ops << ',' << r.wall_ms << ',' << r.doubling_trials;
    return os.str();
}

BenchRow bench_run(const Dataset& ds, const std::string& family, int k, Algorithm algorithm,
                   std::optional<std::uint64_t> out_guess) {
    const auto inst = lift<Counting>(ds.rows, true);
    Instrumented<Counting> ops;
    EvalOptions opt;
    opt.algorithm = algorithm;
    opt.out_guess = out_guess;
    EvalReport rep;
    const auto start = std::chrono::steady_clock::now();
    const auto r = evaluate(ds.query, inst, ops, opt, &rep);
    const auto stop = std::chrono::steady_clock::now();
    BenchRow row;
    row.family = family;
    row.k = k;
    row.n = inst.input_size();
    row.out = r.size();
    row.algorithm = algorithm_name(algorithm);
    row.max_intermediate_rows = rep.stats.max_intermediate_rows;
    row.total_rows_materialized = rep.stats.total_rows_materialized;
    row.semiring_ops = rep.stats.semiring_ops;
    row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    row.doubling_trials = rep.doubling_trials;
    return row;
}

std::uint64_t output_size(const Dataset& ds) {
    return evaluate(ds.query, lift<Counting>(ds.rows, true), Counting{}).size();
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw PreconditionError("slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = std::log(xs[i]), y = std::log(ys[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0) throw PreconditionError("slope fit needs distinct x values");
    return (n * sxy - sx * sy) / den;
}

}  // namespace joinagg
