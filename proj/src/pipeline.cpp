#include "sssc/pipeline.hpp"

#include "sssc/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <string>

namespace sssc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

SolverSummary summarize(const std::vector<SolverReport>& reports) {
    SolverSummary s;
    s.solver = "lasso";
    s.problems = static_cast<Index>(reports.size());
    double iters = 0.0;
    for (const auto& r : reports) {
        if (r.converged) ++s.converged;
        s.max_iterations = std::max(s.max_iterations, r.iterations);
        iters += r.iterations;
        s.max_residual = std::max(s.max_residual, r.residual_norm);
        s.max_kkt_violation = std::max(s.max_kkt_violation, r.kkt_violation);
        s.objective += r.objective;
    }
    s.mean_iterations = reports.empty() ? 0.0 : iters / static_cast<double>(reports.size());
    return s;
}

SolverSummary summarize(const SolverReport& r) {
    SolverSummary s;
    s.solver = "lrr";
    s.problems = 1;
    s.converged = r.converged ? 1 : 0;
    s.max_iterations = r.iterations;
    s.mean_iterations = r.iterations;
    s.max_residual = r.residual_norm;
    s.objective = r.objective;
    return s;
}

bool is_sparse(Algorithm a) { return a == Algorithm::sssc || a == Algorithm::ssc; }
bool is_scalable(Algorithm a) { return a == Algorithm::sssc || a == Algorithm::slrr; }

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
    if (name == "sssc") return Algorithm::sssc;
    if (name == "slrr") return Algorithm::slrr;
    if (name == "ssc") return Algorithm::ssc;
    if (name == "lrr") return Algorithm::lrr;
    throw UsageError("unknown algorithm '" + std::string(name) +
                     "' (expected sssc, slrr, ssc or lrr)");
}

std::string_view to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::sssc: return "sssc";
        case Algorithm::slrr: return "slrr";
        case Algorithm::ssc: return "ssc";
        case Algorithm::lrr: return "lrr";
    }
    return "?";
}

InSampleResult cluster_in_sample(const DataMatrix& x, const RunConfig& cfg) {
    spectral::SpectralOptions opts;
    opts.restarts = cfg.restarts;
    opts.seed = cfg.seed;
    opts.normalize_rows = cfg.normalize_rows;
    opts.solver = cfg.eigensolver;

    InSampleResult out;
    if (is_sparse(cfg.algorithm)) {
        const auto rep = sparse::sparse_self_representation(x, cfg.ssc);
        out.solver = summarize(rep.reports);
        out.labels = spectral::spectral_cluster(rep.C, cfg.k, opts);
    } else {
        const auto sol = lowrank::solve_lrr(x, cfg.lrr);
        out.solver = summarize(sol.report);
        out.labels = spectral::spectral_cluster(sol.C, cfg.k, opts);
        if (cfg.lrr.error_norm == lowrank::ErrorNorm::l21) out.outliers = lowrank::outlier_columns(sol.E);
    }
    return out;
}

RunReport run_pipeline(const DataMatrix& input, const RunConfig& cfg,
                       const ClusterAssignment* truth) {
    const auto start = Clock::now();
    if (cfg.k < 1) throw UsageError("k must be at least 1");
    if (truth && truth->n() != input.n())
        throw DataError("truth has " + std::to_string(truth->n()) + " labels for " +
                        std::to_string(input.n()) + " samples");

    RunReport report;
    report.config = cfg;
    report.n = input.n();

    auto t = Clock::now();
    DataMatrix y = cfg.pca_energy > 0.0 ? dataio::pca_retain_energy(input, cfg.pca_energy) : input;
    report.times.preprocess = seconds_since(t);
    const Index n = y.n();

    if (is_scalable(cfg.algorithm)) {
        if (cfg.p < 1 || cfg.p > n)
            throw UsageError("in-sample count p=" + std::to_string(cfg.p) +
                             " must lie in [1, n=" + std::to_string(n) + "]");
        if (cfg.p < cfg.k)
            throw UsageError("in-sample count p must be at least k");

        t = Clock::now();
        const auto split = dataio::uniform_split(n, cfg.p, cfg.seed);
        const DataMatrix x = y.select(split.in_sample);
        report.times.sampling = seconds_since(t);

        t = Clock::now();
        InSampleResult in = cluster_in_sample(x, cfg);
        report.times.in_sample_clustering = seconds_since(t);
        report.solver = in.solver;

        std::vector<int> labels(static_cast<std::size_t>(n), 0);
        for (std::size_t i = 0; i < split.in_sample.size(); ++i)
            labels[static_cast<std::size_t>(split.in_sample[i])] = in.labels.labels[i];

        if (!split.out_of_sample.empty()) {
            t = Clock::now();
            // Keep flagged outliers out of the dictionary unless that would
            // leave a class without columns.
            std::vector<bool> drop(static_cast<std::size_t>(x.n()), false);
            if (cfg.exclude_outliers && !in.outliers.empty()) {
                std::vector<Index> remaining(static_cast<std::size_t>(cfg.k), 0);
                for (int l : in.labels.labels) ++remaining[static_cast<std::size_t>(l)];
                for (Index c : in.outliers) {
                    auto& left = remaining[static_cast<std::size_t>(in.labels.labels[c])];
                    if (left > 1) {
                        --left;
                        drop[static_cast<std::size_t>(c)] = true;
                        report.excluded_outliers.push_back(split.in_sample[c]);
                    }
                }
            }
            std::vector<Index> keep;
            std::vector<int> keep_labels;
            for (Index c = 0; c < x.n(); ++c) {
                if (drop[static_cast<std::size_t>(c)]) continue;
                keep.push_back(c);
                keep_labels.push_back(in.labels.labels[static_cast<std::size_t>(c)]);
            }
            const oos::ClassDictionary dict(x.select(keep),
                                            ClusterAssignment(std::move(keep_labels), cfg.k),
                                            cfg.gamma);
            const Matrix x_bar = y.select(split.out_of_sample).values();

            oos::AssignOptions opts;
            opts.mode = cfg.coding;
            opts.regularized = cfg.regularized;
            opts.sparse_cfg = cfg.ssc;
            Matrix codes;
            if (cfg.coding == oos::CodingMode::ridge) {
                codes = oos::ridge_codes(dict, x_bar);
            } else {
                codes.resize(dict.p(), x_bar.cols());
                for (Index i = 0; i < x_bar.cols(); ++i)
                    codes.col(i) = oos::sparse_code_oos(dict, x_bar.col(i), cfg.ssc);
            }
            report.times.coding = seconds_since(t);

            t = Clock::now();
            const ClusterAssignment assigned =
                oos::classify_codes(dict, x_bar, codes, cfg.regularized);
            for (std::size_t i = 0; i < split.out_of_sample.size(); ++i)
                labels[static_cast<std::size_t>(split.out_of_sample[i])] = assigned.labels[i];
            report.times.classifying = seconds_since(t);
        }
        report.p = cfg.p;
        report.in_sample = split.in_sample;
        report.labels = ClusterAssignment(std::move(labels), cfg.k);
    } else {
        if (n > cfg.full_data_cap)
            throw UsageError(std::string(to_string(cfg.algorithm)) + " on the whole data set is "
                             "limited to n <= " + std::to_string(cfg.full_data_cap) + " (got n=" +
                             std::to_string(n) + "); use the scalable variant or raise the cap");
        t = Clock::now();
        InSampleResult in = cluster_in_sample(y, cfg);
        report.times.in_sample_clustering = seconds_since(t);
        report.solver = in.solver;
        report.p = n;
        report.labels = std::move(in.labels);
    }

    if (truth) {
        report.accuracy = metrics::accuracy(report.labels, *truth);
        report.nmi = metrics::nmi(report.labels, *truth);
    }
    report.times.total = seconds_since(start);
    return report;
}

}  // namespace sssc
