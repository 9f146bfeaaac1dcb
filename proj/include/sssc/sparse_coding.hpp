#pragma once

#include "sssc/types.hpp"

#include <vector>

namespace sssc::sparse {

/// Parameters of the l1 coding problem
///
///     minimize  lambda * ||y - D c||_2^2 + ||c||_1
///
/// which is the same problem as  1/2 ||y - D c||^2 + w ||c||_1  with the
/// effective l1 weight w = 1 / (2 lambda). In that form c = 0 is optimal
/// exactly when w >= ||D^T y||_inf.
struct SparseSelfRepConfig {
    double lambda = 50.0;
    /// Early-stop fit tolerance: iteration ends once ||y - D c||_2 <= delta.
    /// Zero disables the test.
    double delta = 1e-3;
    int max_iterations = 20000;
    /// Relative tolerance on the optimality conditions (see kkt_violation).
    double kkt_tol = 1e-7;
};

struct SparseCode {
    Vector coefficients;
    std::vector<Index> support;
    SolverReport report;
};

/// Self-representation coefficients, one column per sample, zero diagonal.
struct SelfRepresentation {
    Matrix C;
    std::vector<SolverReport> reports;
};

/// Proximal operator of tau * |x|.
inline double soft_threshold(double x, double tau) {
    if (x > tau) return x - tau;
    if (x < -tau) return x + tau;
    return 0.0;
}

inline double l1_weight(double lambda) { return 0.5 / lambda; }

/// Squared spectral norm of `dict` by power iteration on D^T D.
double spectral_norm_squared(const Eigen::Ref<const Matrix>& dict, int iterations = 50,
                             double tol = 1e-8);

/// Largest relative violation of the LASSO optimality conditions at `c`:
/// on the support |g_j + w sign(c_j)| / w, off the support (|g_j| - w)_+ / w,
/// where g = D^T (D c - y) and w = l1_weight(lambda).
double kkt_violation(const Eigen::Ref<const Matrix>& dict, const Eigen::Ref<const Vector>& y,
                     const Eigen::Ref<const Vector>& c, double lambda);

/// lambda * ||y - D c||^2 + ||c||_1
double lasso_objective(const Eigen::Ref<const Matrix>& dict, const Eigen::Ref<const Vector>& y,
                       const Eigen::Ref<const Vector>& c, double lambda);

/// Accelerated proximal gradient with adaptive restart. The step size starts
/// at 1/L with L from spectral_norm_squared and is backtracked if the
/// power-iteration estimate proves too small. Once the sign pattern settles,
/// the problem restricted to the support is solved directly and accepted if
/// it satisfies the optimality conditions. Uses `lambda`, not cfg.lambda.
SparseCode solve_lasso(const Eigen::Ref<const Matrix>& dict, const Eigen::Ref<const Vector>& y,
                       double lambda, const SparseSelfRepConfig& cfg);

/// Column i of C codes y_i over Y with column i replaced by zeros. Columns are
/// solved independently (in parallel when OpenMP is available); results do
/// not depend on the schedule.
SelfRepresentation sparse_self_representation(const DataMatrix& y,
                                              const SparseSelfRepConfig& cfg);

}  // namespace sssc::sparse
