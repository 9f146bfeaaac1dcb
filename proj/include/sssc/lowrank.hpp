#pragma once

#include "sssc/types.hpp"

#include <string_view>
#include <vector>

namespace sssc::lowrank {

/// Penalty on the error term E.
///   l21: sum of column norms (sample-specific corruption)
///   l1:  sum of absolute entries (random entry corruption)
///   fro: squared Frobenius norm (small dense noise), giving a ridge update
enum class ErrorNorm { l21, l1, fro };

ErrorNorm parse_error_norm(std::string_view name);
std::string_view to_string(ErrorNorm norm);

struct LrrConfig {
    double lambda = 1.0;
    ErrorNorm error_norm = ErrorNorm::l21;
    double mu_init = 1e-2;
    double rho = 1.5;
    double mu_max = 1e10;
    double constraint_tol = 1e-7;
    int max_iterations = 500;
    /// When positive, singular value thresholding uses a randomized partial
    /// SVD of this many leading components instead of a full SVD.
    Index rank_bound = 0;
};

struct LrrSolution {
    Matrix C;
    Matrix E;
    SolverReport report;
};

/// U * max(S - tau, 0) * V^T.
Matrix svt(const Matrix& m, double tau);

/// Same as svt but only the leading `rank` singular triplets are computed;
/// exact when the shrunk matrix has rank <= `rank`.
Matrix svt_partial(const Matrix& m, double tau, Index rank);

/// Column j becomes max(1 - tau / ||m_j||, 0) m_j.
Matrix l21_shrink(const Matrix& m, double tau);

double nuclear_norm(const Matrix& m);

/// Inexact ALM for  min ||C||_* + lambda ||E||  s.t.  Y = Y C + E, using the
/// splitting C = J so that every subproblem has a closed form. Stops when both
/// ||Y - YC - E||_F and ||C - J||_F fall below constraint_tol * max(1, ||Y||_F).
LrrSolution solve_lrr(const DataMatrix& y, const LrrConfig& cfg);

/// Columns of E whose norm exceeds `factor` times the median column norm
/// (and 1e-6 times the largest column norm, so round-off is ignored when the
/// median is zero).
std::vector<Index> outlier_columns(const Matrix& e, double factor = 10.0);

/// lambda = 3 / (7 ||X||_2 sqrt(eps * p)) for an outlier fraction eps over p columns.
double corruption_lambda(const Matrix& x, double outlier_fraction);

}  // namespace sssc::lowrank
