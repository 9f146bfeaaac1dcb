#pragma once

#include "sssc/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sssc::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNotConverged = 3 };

/// Report document with a fixed key order:
///   algorithm, n, p, k, seed, config{...}, accuracy, nmi,
///   times{load, preprocess, sampling, in_sample_clustering, coding,
///         classifying, total},
///   solver{...}, converged, in_sample[...], excluded_outliers[...], labels[...]
nlohmann::ordered_json report_to_json(const RunReport& report);

struct BenchRow {
    Index n = 0;
    StageTimes times;
    double accuracy = 0.0;
    /// coding + classifying
    double classification() const { return times.coding + times.classifying; }
};

struct BenchResult {
    std::vector<BenchRow> rows;
    /// Least-squares slope of log(classification time) against log(n);
    /// empty for fewer than two rows.
    std::optional<double> slope;
};

struct BenchParams {
    std::vector<Index> n_values;
    int k = 5;
    int ambient = 50;
    int dim = 5;
    int repeats = 3;
    RunConfig run;
};

/// Runs the scalable pipeline on generated data for each n (fixed p) and
/// fits the log-log slope of the classification stage. Each stage time is
/// the minimum over `repeats` runs.
BenchResult run_bench(const BenchParams& params);

nlohmann::ordered_json bench_to_json(const BenchParams& params, const BenchResult& result);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sssc::cli
