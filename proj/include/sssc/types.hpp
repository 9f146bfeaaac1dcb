#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sssc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error taxonomy. The CLI maps these onto process exit codes.

/// Invalid arguments or violated preconditions (exit code 1).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed, inconsistent or degenerate data (exit code 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine failed outright (eigensolver breakdown, SVD failure).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Column-major real matrix whose columns are samples.
///
/// Construction validates the shape (m >= 1, n >= 1) and that every entry is
/// finite, so downstream code never has to re-check.
class DataMatrix {
public:
    DataMatrix() = default;
    explicit DataMatrix(Matrix values);

    const Matrix& values() const noexcept { return values_; }
    Index m() const noexcept { return values_.rows(); }
    Index n() const noexcept { return values_.cols(); }

    /// Columns listed in `idx`, in that order.
    DataMatrix select(const std::vector<Index>& idx) const;

private:
    Matrix values_;
};

/// Per-sample integer labels in [0, k).
struct ClusterAssignment {
    std::vector<int> labels;
    int k = 0;

    ClusterAssignment() = default;
    ClusterAssignment(std::vector<int> labels, int k);

    Index n() const noexcept { return static_cast<Index>(labels.size()); }
};

struct SolverReport {
    int iterations = 0;
    double objective = 0.0;
    /// Primary residual of the solver: data-fit residual for LASSO,
    /// relative constraint residual for LRR.
    double residual_norm = 0.0;
    /// LASSO only: relative violation of the optimality conditions.
    double kkt_violation = 0.0;
    bool converged = false;
};

}  // namespace sssc
