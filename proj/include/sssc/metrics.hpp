#pragma once

#include "sssc/types.hpp"

#include <vector>

namespace sssc::metrics {

/// counts(a, b) = #{i : pred_i = a, truth_i = b}.
struct ContingencyTable {
    Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;
    long long n = 0;
};

/// Optimal assignment of rows to columns.
struct LabelMapping {
    /// mapping[row] = assigned column.
    std::vector<int> mapping;
    double cost = 0.0;
    /// Agreeing samples under the mapping (set by best_mapping only).
    long long matched = 0;
};

ContingencyTable contingency(const ClusterAssignment& pred, const ClusterAssignment& truth);

/// Kuhn-Munkres with potentials, O(n^3). Rectangular inputs are padded to
/// square with zero-cost dummy rows or columns; the mapping only covers the
/// real rows, and a row mapped to a dummy column gets -1.
LabelMapping hungarian(const Matrix& cost);

/// Optimal injective map from predicted ids to truth ids, maximizing agreement.
LabelMapping best_mapping(const ClusterAssignment& pred, const ClusterAssignment& truth);

/// Fraction of samples that agree under the best one-to-one label mapping.
double accuracy(const ClusterAssignment& pred, const ClusterAssignment& truth);

/// Base-2 entropy of a partition.
double entropy(const ClusterAssignment& labels);

double mutual_information(const ClusterAssignment& pred, const ClusterAssignment& truth);

/// MI / max(H(pred), H(truth)); 0 when both entropies vanish.
double nmi(const ClusterAssignment& pred, const ClusterAssignment& truth);

}  // namespace sssc::metrics
