#pragma once

#include "sssc/dataio.hpp"
#include "sssc/lowrank.hpp"
#include "sssc/oos.hpp"
#include "sssc/sparse_coding.hpp"
#include "sssc/spectral.hpp"
#include "sssc/types.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sssc {

/// sssc / slrr: sample, cluster the sample, code and classify the rest.
/// ssc / lrr: cluster the whole data set directly.
enum class Algorithm { sssc, slrr, ssc, lrr };

Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm algorithm);

struct RunConfig {
    Algorithm algorithm = Algorithm::sssc;
    int k = 2;
    /// In-sample count; ignored by the whole-data algorithms.
    Index p = 0;
    std::uint64_t seed = 0;
    sparse::SparseSelfRepConfig ssc{};
    lowrank::LrrConfig lrr{};
    double gamma = 1e-6;
    oos::CodingMode coding = oos::CodingMode::ridge;
    bool regularized = true;
    int restarts = 20;
    bool normalize_rows = true;
    spectral::Eigensolver eigensolver = spectral::Eigensolver::dense;
    /// PCA energy retained before clustering; 0 disables PCA.
    double pca_energy = 0.0;
    /// Largest n accepted by the whole-data algorithms.
    Index full_data_cap = 3000;
    /// slrr: drop in-sample columns flagged as corrupted (l21 error only)
    /// from the out-of-sample dictionary.
    bool exclude_outliers = true;
};

/// Wall-clock seconds per stage.
struct StageTimes {
    double load = 0.0;
    double preprocess = 0.0;
    double sampling = 0.0;
    double in_sample_clustering = 0.0;
    double coding = 0.0;
    double classifying = 0.0;
    double total = 0.0;

    double staged_sum() const {
        return load + preprocess + sampling + in_sample_clustering + coding + classifying;
    }
};

/// Aggregate of per-column LASSO reports or the single LRR report.
struct SolverSummary {
    std::string_view solver;
    Index problems = 0;
    Index converged = 0;
    int max_iterations = 0;
    double mean_iterations = 0.0;
    double max_residual = 0.0;
    double max_kkt_violation = 0.0;
    double objective = 0.0;
};

struct RunReport {
    RunConfig config;
    Index n = 0;
    Index p = 0;
    ClusterAssignment labels;
    std::optional<double> accuracy;
    std::optional<double> nmi;
    StageTimes times;
    SolverSummary solver;
    std::vector<Index> in_sample;
    /// Original indices of in-sample columns excluded from the dictionary.
    std::vector<Index> excluded_outliers;

    bool converged() const { return solver.converged == solver.problems; }
};

/// Clusters the columns of a data set with spectral clustering on SSC or LRR
/// coefficients. Returns the labels, the summary of the coefficient solver and,
/// for LRR with l21 error, the columns flagged as corrupted.
struct InSampleResult {
    ClusterAssignment labels;
    SolverSummary solver;
    std::vector<Index> outliers;
};

InSampleResult cluster_in_sample(const DataMatrix& x, const RunConfig& cfg);

/// Runs the configured algorithm. `truth`, when given, fills accuracy and nmi.
/// Labels come back in the original sample order.
RunReport run_pipeline(const DataMatrix& y, const RunConfig& cfg,
                       const ClusterAssignment* truth = nullptr);

}  // namespace sssc
