#include "sssc/types.hpp"

#include <string>

namespace sssc {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw DataError("data matrix must have at least one row and one column");
    if (!values_.allFinite())
        throw DataError("data matrix contains non-finite entries");
}

DataMatrix DataMatrix::select(const std::vector<Index>& idx) const {
    Matrix out(values_.rows(), static_cast<Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) {
        if (idx[j] < 0 || idx[j] >= values_.cols())
            throw UsageError("column index out of range: " + std::to_string(idx[j]));
        out.col(static_cast<Index>(j)) = values_.col(idx[j]);
    }
    return DataMatrix(std::move(out));
}

ClusterAssignment::ClusterAssignment(std::vector<int> l, int kk)
    : labels(std::move(l)), k(kk) {
    if (k < 0) throw UsageError("cluster count must be nonnegative");
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= k)
            throw DataError("label " + std::to_string(labels[i]) + " at position " +
                            std::to_string(i) + " outside [0, " + std::to_string(k) + ")");
    }
}

}  // namespace sssc
