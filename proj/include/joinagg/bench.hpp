#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "joinagg/driver.hpp"
#include "joinagg/generators.hpp"

namespace joinagg {

/// One measured run: a generated instance evaluated by one algorithm over counting.
struct BenchRow {
    std::string family;
    int k = 0;
    std::uint64_t n = 0;          // realized input size
    std::uint64_t out = 0;        // result size
    std::string algorithm;
    std::uint64_t max_intermediate_rows = 0;
    std::uint64_t total_rows_materialized = 0;
    std::uint64_t semiring_ops = 0;
    double wall_ms = 0;
    int doubling_trials = 0;
};

std::string bench_csv_header();
std::string bench_csv_line(const BenchRow& r);

/// Evaluates `ds` with unit counting weights. `out_guess` empty means the algorithm's own
/// fallback (doubling or KMV).
BenchRow bench_run(const Dataset& ds, const std::string& family, int k, Algorithm algorithm,
                   std::optional<std::uint64_t> out_guess);

/// Result size of `ds` under auto evaluation.
std::uint64_t output_size(const Dataset& ds);

/// Least-squares slope of log(ys) against log(xs).
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace joinagg
