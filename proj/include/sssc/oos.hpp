#pragma once

#include "sssc/sparse_coding.hpp"
#include "sssc/types.hpp"

#include <vector>

namespace sssc::oos {

enum class CodingMode { ridge, sparse };

/// In-sample dictionary with its labels and the cached ridge projector
/// P = (X^T X + gamma I)^{-1} X^T, computed through a Cholesky factorization.
class ClassDictionary {
public:
    ClassDictionary(DataMatrix x, ClusterAssignment labels, double gamma);

    const DataMatrix& x() const noexcept { return x_; }
    const ClusterAssignment& labels() const noexcept { return labels_; }
    const Matrix& projector() const noexcept { return projector_; }
    double gamma() const noexcept { return gamma_; }
    int k() const noexcept { return labels_.k; }
    Index m() const noexcept { return x_.m(); }
    Index p() const noexcept { return x_.n(); }

    /// Dictionary column indices carrying label j.
    const std::vector<Index>& members(int j) const { return members_[static_cast<std::size_t>(j)]; }

private:
    DataMatrix x_;
    ClusterAssignment labels_;
    double gamma_;
    Matrix projector_;
    std::vector<std::vector<Index>> members_;
};

struct Assignment {
    int label = 0;
    Vector residuals;
    Vector coefficients;
};

/// Thrown when every class residual is infinite (the code is identically zero).
class UnassignableError : public DataError {
public:
    using DataError::DataError;
};

ClassDictionary build_dictionary(const DataMatrix& x, const ClusterAssignment& labels,
                                 double gamma = 1e-6);

/// argmin ||x - X c||^2 + gamma ||c||^2 = P x.
Vector ridge_code(const ClassDictionary& dict, const Eigen::Ref<const Vector>& x);

/// Codes for many columns at once: P * X_bar.
Matrix ridge_codes(const ClassDictionary& dict, const Matrix& x_bar);

/// l1 code of x over the dictionary (no zero-diagonal constraint).
Vector sparse_code_oos(const ClassDictionary& dict, const Eigen::Ref<const Vector>& x,
                       const sparse::SparseSelfRepConfig& cfg);

/// r_j = ||x - X delta_j(c)||, divided by ||delta_j(c)|| when `regularized`.
/// A class whose masked code is zero gets +infinity in the regularized form.
Vector class_residuals(const ClassDictionary& dict, const Eigen::Ref<const Vector>& x,
                       const Eigen::Ref<const Vector>& c, bool regularized);

/// argmin over residuals, first index on ties. Throws UnassignableError when
/// no residual is finite.
int argmin_residual(const Vector& residuals);

struct AssignOptions {
    CodingMode mode = CodingMode::ridge;
    bool regularized = true;
    sparse::SparseSelfRepConfig sparse_cfg{};
};

Assignment assign(const ClassDictionary& dict, const Eigen::Ref<const Vector>& x,
                  const AssignOptions& opts = {});

/// Labels for precomputed codes (one column per sample).
ClusterAssignment classify_codes(const ClassDictionary& dict, const Matrix& x_bar,
                                 const Matrix& codes, bool regularized);

/// Per-column assign over X_bar. Failing columns are collected and reported
/// together in one UnassignableError.
ClusterAssignment assign_batch(const ClassDictionary& dict, const DataMatrix& x_bar,
                               const AssignOptions& opts = {});

/// Same as assign_batch, tolerating an empty X_bar.
ClusterAssignment assign_batch(const ClassDictionary& dict, const Matrix& x_bar,
                               const AssignOptions& opts = {});

}  // namespace sssc::oos
