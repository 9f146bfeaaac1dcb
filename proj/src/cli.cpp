#include "sssc/cli.hpp"

#include "sssc/dataio.hpp"
#include "sssc/metrics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace sssc::cli {

using json = nlohmann::ordered_json;

namespace {

std::string_view to_string(oos::CodingMode mode) {
    return mode == oos::CodingMode::ridge ? "ridge" : "sparse";
}

std::string_view to_string(spectral::Eigensolver s) {
    switch (s) {
        case spectral::Eigensolver::dense: return "dense";
        case spectral::Eigensolver::krylov: return "krylov";
        case spectral::Eigensolver::automatic: return "auto";
    }
    return "?";
}

json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failure on " + path.string());
}

// Options shared by `cluster` and `bench`.
struct SolverFlags {
    std::string algorithm = "sssc";
    std::optional<double> lambda;
    std::string error_norm = "l21";
    std::string coding = "ridge";
    std::string eigensolver = "dense";
    bool unregularized = false;
    bool unit_eigenvectors = false;
    bool keep_outliers = false;
    RunConfig run;

    void add_to(CLI::App& app) {
        app.add_option("--algorithm,-a", algorithm, "sssc, slrr, ssc or lrr")
            ->check(CLI::IsMember({"sssc", "slrr", "ssc", "lrr"}))
            ->capture_default_str();
        app.add_option("--p", run.p, "number of in-sample points (sssc/slrr)");
        app.add_option("--lambda", lambda,
                       "lambda of the selected algorithm (default 50 for SSC, 1 for LRR)");
        app.add_option("--delta", run.ssc.delta, "SSC fit tolerance")->capture_default_str();
        app.add_option("--max-iter", run.ssc.max_iterations, "LASSO iteration cap")
            ->capture_default_str();
        app.add_option("--kkt-tol", run.ssc.kkt_tol, "LASSO optimality tolerance")
            ->capture_default_str();
        app.add_option("--error-norm", error_norm, "LRR error norm: l21, l1 or fro")
            ->check(CLI::IsMember({"l21", "l1", "fro"}))
            ->capture_default_str();
        app.add_option("--mu-init", run.lrr.mu_init)->capture_default_str();
        app.add_option("--rho", run.lrr.rho)->capture_default_str();
        app.add_option("--mu-max", run.lrr.mu_max)->capture_default_str();
        app.add_option("--constraint-tol", run.lrr.constraint_tol)->capture_default_str();
        app.add_option("--lrr-max-iter", run.lrr.max_iterations)->capture_default_str();
        app.add_option("--rank-bound", run.lrr.rank_bound,
                       "partial SVD rank for LRR (0 = full SVD)")
            ->capture_default_str();
        app.add_option("--gamma", run.gamma, "ridge parameter for out-of-sample coding")
            ->capture_default_str();
        app.add_option("--coding", coding, "out-of-sample coding: ridge or sparse")
            ->check(CLI::IsMember({"ridge", "sparse"}))
            ->capture_default_str();
        app.add_flag("--unregularized", unregularized,
                     "plain class residuals instead of residual / code norm");
        app.add_option("--restarts", run.restarts, "k-means restarts")->capture_default_str();
        app.add_option("--eigensolver", eigensolver, "dense, krylov or auto")
            ->check(CLI::IsMember({"dense", "krylov", "auto"}))
            ->capture_default_str();
        app.add_flag("--unit-eigenvectors", unit_eigenvectors,
                     "skip row normalization of the spectral embedding");
        app.add_option("--pca-energy", run.pca_energy, "PCA energy to retain (0 = off)")
            ->capture_default_str();
        app.add_option("--cap", run.full_data_cap, "largest n for whole-data ssc/lrr")
            ->capture_default_str();
        app.add_flag("--keep-outliers", keep_outliers,
                     "keep LRR-flagged corrupted columns in the dictionary");
    }

    RunConfig resolve() const {
        RunConfig cfg = run;
        cfg.algorithm = parse_algorithm(algorithm);
        if (lambda) {
            cfg.ssc.lambda = *lambda;
            cfg.lrr.lambda = *lambda;
        }
        cfg.lrr.error_norm = lowrank::parse_error_norm(error_norm);
        cfg.coding = coding == "ridge" ? oos::CodingMode::ridge : oos::CodingMode::sparse;
        cfg.regularized = !unregularized;
        cfg.normalize_rows = !unit_eigenvectors;
        cfg.exclude_outliers = !keep_outliers;
        cfg.eigensolver = eigensolver == "dense"    ? spectral::Eigensolver::dense
                          : eigensolver == "krylov" ? spectral::Eigensolver::krylov
                                                    : spectral::Eigensolver::automatic;
        return cfg;
    }
};

int cmd_synth(const dataio::SynthParams& params, const std::string& data_path,
              const std::string& labels_path, std::string corrupted_path, std::ostream& out) {
    const auto ds = dataio::synth_subspaces(params);
    dataio::save_csv(data_path, ds.data);
    dataio::save_labels(labels_path, ds.truth.labels);
    Index n_bad = 0;
    if (params.corrupt_frac > 0.0) {
        if (corrupted_path.empty()) corrupted_path = labels_path + ".corrupted";
        std::vector<int> mask(ds.corrupted.size());
        for (std::size_t i = 0; i < mask.size(); ++i) {
            mask[i] = ds.corrupted[i] ? 1 : 0;
            n_bad += mask[i];
        }
        dataio::save_labels(corrupted_path, mask);
    }
    out << "wrote " << ds.data.n() << " samples (ambient " << ds.data.m() << ", " << params.k
        << " subspaces, " << n_bad << " corrupted) to " << data_path << '\n';
    return kOk;
}

int cmd_cluster(const RunConfig& cfg, const std::string& input, bool has_header,
                const std::string& truth_path, const std::string& report_path,
                std::string labels_path, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const DataMatrix y = dataio::load_csv(input, has_header);
    std::optional<ClusterAssignment> truth;
    if (!truth_path.empty()) truth = dataio::load_labels(truth_path);
    const double load = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    RunReport report = run_pipeline(y, cfg, truth ? &*truth : nullptr);
    report.times.load = load;
    report.times.total += load;

    if (labels_path.empty() && !report_path.empty()) labels_path = report_path + ".labels";
    if (!report_path.empty()) write_text(report_path, report_to_json(report).dump(2) + "\n");
    if (!labels_path.empty()) dataio::save_labels(labels_path, report.labels.labels);

    out << to_string(cfg.algorithm) << ": n=" << report.n << " p=" << report.p
        << " k=" << cfg.k << " total=" << std::fixed << std::setprecision(3)
        << report.times.total << "s";
    if (report.accuracy) out << " accuracy=" << *report.accuracy << " nmi=" << *report.nmi;
    out << '\n';
    out.unsetf(std::ios::floatfield);
    if (!report.converged()) {
        out << "warning: " << report.solver.problems - report.solver.converged << " of "
            << report.solver.problems << " solver runs did not converge\n";
        return kNotConverged;
    }
    return kOk;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path,
             const std::string& out_path, std::ostream& out) {
    const ClusterAssignment pred = dataio::load_labels(pred_path);
    const ClusterAssignment truth = dataio::load_labels(truth_path);
    if (pred.n() != truth.n())
        throw DataError("label files differ in length: " + std::to_string(pred.n()) + " vs " +
                        std::to_string(truth.n()));
    json doc;
    doc["accuracy"] = metrics::accuracy(pred, truth);
    doc["nmi"] = metrics::nmi(pred, truth);
    const std::string text = doc.dump() + "\n";
    out << text;
    if (!out_path.empty()) write_text(out_path, text);
    return kOk;
}

int cmd_bench(const BenchParams& params, const std::string& out_path, std::ostream& out) {
    const BenchResult result = run_bench(params);
    out << std::setw(8) << "n" << std::setw(12) << "sampling" << std::setw(12) << "in_sample"
        << std::setw(12) << "coding" << std::setw(12) << "classify" << std::setw(12) << "total"
        << std::setw(10) << "accuracy" << '\n';
    out << std::fixed << std::setprecision(4);
    for (const auto& row : result.rows) {
        out << std::setw(8) << row.n << std::setw(12) << row.times.sampling << std::setw(12)
            << row.times.in_sample_clustering << std::setw(12) << row.times.coding
            << std::setw(12) << row.times.classifying << std::setw(12) << row.times.total
            << std::setw(10) << row.accuracy << '\n';
    }
    if (result.slope) out << "classification log-log slope: " << *result.slope << '\n';
    out.unsetf(std::ios::floatfield);
    if (!out_path.empty()) write_text(out_path, bench_to_json(params, result).dump(2) + "\n");
    return kOk;
}

}  // namespace

json report_to_json(const RunReport& r) {
    const RunConfig& c = r.config;
    json doc;
    doc["algorithm"] = std::string(sssc::to_string(c.algorithm));
    doc["n"] = r.n;
    doc["p"] = r.p;
    doc["k"] = c.k;
    doc["seed"] = c.seed;

    json cfg;
    cfg["ssc_lambda"] = c.ssc.lambda;
    cfg["ssc_delta"] = c.ssc.delta;
    cfg["ssc_max_iterations"] = c.ssc.max_iterations;
    cfg["ssc_kkt_tol"] = c.ssc.kkt_tol;
    cfg["lrr_lambda"] = c.lrr.lambda;
    cfg["lrr_error_norm"] = std::string(lowrank::to_string(c.lrr.error_norm));
    cfg["lrr_mu_init"] = c.lrr.mu_init;
    cfg["lrr_rho"] = c.lrr.rho;
    cfg["lrr_mu_max"] = c.lrr.mu_max;
    cfg["lrr_constraint_tol"] = c.lrr.constraint_tol;
    cfg["lrr_max_iterations"] = c.lrr.max_iterations;
    cfg["lrr_rank_bound"] = c.lrr.rank_bound;
    cfg["gamma"] = c.gamma;
    cfg["coding"] = std::string(to_string(c.coding));
    cfg["regularized"] = c.regularized;
    cfg["restarts"] = c.restarts;
    cfg["normalize_rows"] = c.normalize_rows;
    cfg["eigensolver"] = std::string(to_string(c.eigensolver));
    cfg["pca_energy"] = c.pca_energy;
    cfg["full_data_cap"] = c.full_data_cap;
    cfg["exclude_outliers"] = c.exclude_outliers;
    doc["config"] = std::move(cfg);

    doc["accuracy"] = optional_number(r.accuracy);
    doc["nmi"] = optional_number(r.nmi);

    json times;
    times["load"] = r.times.load;
    times["preprocess"] = r.times.preprocess;
    times["sampling"] = r.times.sampling;
    times["in_sample_clustering"] = r.times.in_sample_clustering;
    times["coding"] = r.times.coding;
    times["classifying"] = r.times.classifying;
    times["total"] = r.times.total;
    doc["times"] = std::move(times);

    json solver;
    solver["name"] = std::string(r.solver.solver);
    solver["problems"] = r.solver.problems;
    solver["converged"] = r.solver.converged;
    solver["max_iterations"] = r.solver.max_iterations;
    solver["mean_iterations"] = r.solver.mean_iterations;
    solver["max_residual"] = r.solver.max_residual;
    solver["max_kkt_violation"] = r.solver.max_kkt_violation;
    solver["objective"] = r.solver.objective;
    doc["solver"] = std::move(solver);

    doc["converged"] = r.converged();
    doc["in_sample"] = r.in_sample;
    doc["excluded_outliers"] = r.excluded_outliers;
    doc["labels"] = r.labels.labels;
    return doc;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw UsageError("slope fit needs at least two paired values");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw DataError("slope fit needs positive values");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw UsageError("slope fit needs distinct x values");
    return sxy / sxx;
}

BenchResult run_bench(const BenchParams& params) {
    if (params.n_values.empty()) throw UsageError("bench: no n values given");
    if (params.repeats < 1) throw UsageError("bench: repeats must be at least 1");
    const Index smallest = *std::min_element(params.n_values.begin(), params.n_values.end());
    if (params.run.algorithm != Algorithm::sssc && params.run.algorithm != Algorithm::slrr)
        throw UsageError("bench: only the scalable algorithms (sssc, slrr) are benchmarked");
    if (params.run.p < 1 || params.run.p > smallest)
        throw UsageError("bench: p=" + std::to_string(params.run.p) +
                         " must lie in [1, smallest n=" + std::to_string(smallest) + "]");
    if (params.k < 1 || params.n_values.size() == 0) throw UsageError("bench: invalid k");

    BenchResult result;
    for (Index n : params.n_values) {
        dataio::SynthParams sp;
        sp.k = params.k;
        sp.ambient = params.ambient;
        sp.dim_per.assign(static_cast<std::size_t>(params.k), params.dim);
        sp.points_per.assign(static_cast<std::size_t>(params.k), static_cast<int>(n / params.k));
        for (Index extra = 0; extra < n % params.k; ++extra) ++sp.points_per[static_cast<std::size_t>(extra)];
        sp.seed = params.run.seed;
        const auto ds = dataio::synth_subspaces(sp);

        RunConfig cfg = params.run;
        cfg.k = params.k;
        BenchRow row;
        row.n = n;
        for (int r = 0; r < params.repeats; ++r) {
            const RunReport rep = run_pipeline(ds.data, cfg, &ds.truth);
            auto keep_min = [r](double& slot, double v) { slot = r == 0 ? v : std::min(slot, v); };
            keep_min(row.times.preprocess, rep.times.preprocess);
            keep_min(row.times.sampling, rep.times.sampling);
            keep_min(row.times.in_sample_clustering, rep.times.in_sample_clustering);
            keep_min(row.times.coding, rep.times.coding);
            keep_min(row.times.classifying, rep.times.classifying);
            keep_min(row.times.total, rep.times.total);
            row.accuracy = *rep.accuracy;
        }
        result.rows.push_back(row);
    }
    if (result.rows.size() >= 2) {
        std::vector<double> xs, ys;
        for (const auto& row : result.rows) {
            xs.push_back(static_cast<double>(row.n));
            ys.push_back(row.classification());
        }
        result.slope = loglog_slope(xs, ys);
    }
    return result;
}

json bench_to_json(const BenchParams& params, const BenchResult& result) {
    json doc;
    doc["algorithm"] = std::string(sssc::to_string(params.run.algorithm));
    doc["p"] = params.run.p;
    doc["k"] = params.k;
    doc["ambient"] = params.ambient;
    doc["dim"] = params.dim;
    doc["repeats"] = params.repeats;
    doc["seed"] = params.run.seed;
    json rows = json::array();
    for (const auto& row : result.rows) {
        json r;
        r["n"] = row.n;
        r["sampling"] = row.times.sampling;
        r["in_sample_clustering"] = row.times.in_sample_clustering;
        r["coding"] = row.times.coding;
        r["classifying"] = row.times.classifying;
        r["classification"] = row.classification();
        r["total"] = row.times.total;
        r["accuracy"] = row.accuracy;
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    doc["classification_slope"] = result.slope ? json(*result.slope) : json(nullptr);
    return doc;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scalable sparse and low-rank subspace clustering"};
    app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate union-of-subspaces data with labels");
    dataio::SynthParams sp;
    std::vector<int> dims{4}, points{40};
    std::string synth_out, synth_labels, synth_corrupted;
    synth->add_option("--k", sp.k, "number of subspaces")->capture_default_str();
    synth->add_option("--ambient", sp.ambient, "ambient dimension")->capture_default_str();
    synth->add_option("--dims", dims, "subspace dimensions (one value, or k values)");
    synth->add_option("--points", points, "points per subspace (one value, or k values)");
    synth->add_option("--noise", sp.noise_sigma, "isotropic noise scale")->capture_default_str();
    synth->add_option("--corrupt", sp.corrupt_frac, "fraction of outlier columns")
        ->capture_default_str();
    synth->add_option("--seed", sp.seed, "random seed")->required();
    synth->add_option("--out,-o", synth_out, "data CSV (rows are samples)")->required();
    synth->add_option("--labels", synth_labels, "ground-truth label file")->required();
    synth->add_option("--corrupted", synth_corrupted,
                      "corruption mask file, one 0/1 per line (default <labels>.corrupted)");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "cluster a CSV data set");
    SolverFlags cluster_flags;
    std::string input, truth_path, report_path, labels_path;
    bool has_header = false;
    cluster->add_option("--input,-i", input, "data CSV (rows are samples)")->required();
    cluster->add_flag("--header", has_header, "skip the first CSV line");
    cluster->add_option("--truth", truth_path, "ground-truth labels for accuracy and nmi");
    cluster->add_option("--out,-o", report_path, "JSON report path");
    cluster->add_option("--labels-out", labels_path, "label file (default <out>.labels)");
    cluster->add_option("--k", cluster_flags.run.k, "number of clusters")->required();
    cluster->add_option("--seed", cluster_flags.run.seed, "random seed")->required();
    cluster_flags.add_to(*cluster);

    // bench
    auto* bench = app.add_subcommand("bench", "scaling benchmark on generated data");
    SolverFlags bench_flags;
    bench_flags.run.p = 200;
    BenchParams bp;
    std::vector<Index> n_values{2000, 4000, 8000};
    std::string bench_out;
    bench->add_option("--n", n_values, "sample counts")->capture_default_str();
    bench->add_option("--k", bp.k, "subspaces")->capture_default_str();
    bench->add_option("--ambient", bp.ambient)->capture_default_str();
    bench->add_option("--dim", bp.dim, "dimension of every subspace")->capture_default_str();
    bench->add_option("--repeats", bp.repeats, "runs per n; stage times are minima")
        ->capture_default_str();
    bench->add_option("--seed", bench_flags.run.seed)->capture_default_str();
    bench->add_option("--out,-o", bench_out, "JSON output path");
    bench_flags.add_to(*bench);

    // eval
    auto* eval = app.add_subcommand("eval", "accuracy and nmi of predicted labels");
    std::string pred_path, eval_truth, eval_out;
    eval->add_option("pred", pred_path, "predicted label file")->required();
    eval->add_option("truth", eval_truth, "ground-truth label file")->required();
    eval->add_option("--out,-o", eval_out, "also write the JSON here");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("sssc");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (synth->parsed()) {
            auto expand = [&](const std::vector<int>& v, const char* what) {
                if (v.size() == 1) return std::vector<int>(static_cast<std::size_t>(sp.k), v[0]);
                if (static_cast<int>(v.size()) != sp.k)
                    throw UsageError(std::string("--") + what + " needs 1 or k values");
                return v;
            };
            if (sp.k < 1) throw UsageError("--k must be at least 1");
            sp.dim_per = expand(dims, "dims");
            sp.points_per = expand(points, "points");
            return cmd_synth(sp, synth_out, synth_labels, synth_corrupted, out);
        }
        if (cluster->parsed()) {
            return cmd_cluster(cluster_flags.resolve(), input, has_header, truth_path,
                               report_path, labels_path, out);
        }
        if (bench->parsed()) {
            bp.n_values = n_values;
            bp.run = bench_flags.resolve();
            return cmd_bench(bp, bench_out, out);
        }
        if (eval->parsed()) return cmd_eval(pred_path, eval_truth, eval_out, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return kNotConverged;
    } catch (const std::exception& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}

}  // namespace sssc::cli
