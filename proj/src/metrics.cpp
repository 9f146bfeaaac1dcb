#include "sssc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sssc::metrics {

namespace {

void check_lengths(const ClusterAssignment& a, const ClusterAssignment& b) {
    if (a.n() != b.n())
        throw UsageError("label vectors differ in length: " + std::to_string(a.n()) + " vs " +
                         std::to_string(b.n()));
}

double plogp_sum(const std::vector<long long>& counts, long long n) {
    double h = 0.0;
    for (long long c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

ContingencyTable contingency(const ClusterAssignment& pred, const ClusterAssignment& truth) {
    check_lengths(pred, truth);
    ContingencyTable t;
    t.counts = decltype(t.counts)::Zero(pred.k, truth.k);
    for (std::size_t i = 0; i < pred.labels.size(); ++i)
        ++t.counts(pred.labels[i], truth.labels[i]);
    t.n = static_cast<long long>(pred.labels.size());
    return t;
}

LabelMapping hungarian(const Matrix& cost) {
    if (!cost.allFinite()) throw UsageError("hungarian: cost matrix has non-finite entries");
    const Index rows = cost.rows();
    const Index size = std::max(cost.rows(), cost.cols());
    LabelMapping out;
    out.mapping.assign(static_cast<std::size_t>(rows), -1);
    if (size == 0) return out;

    Matrix a = Matrix::Zero(size, size);
    a.topLeftCorner(cost.rows(), cost.cols()) = cost;

    // Shortest augmenting paths with row/column potentials; index 0 is a sentinel.
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = static_cast<std::size_t>(size);
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a(static_cast<Index>(i0 - 1), static_cast<Index>(j - 1)) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    for (std::size_t j = 1; j <= n; ++j) {
        const Index row = static_cast<Index>(match[j]) - 1;
        const Index col = static_cast<Index>(j) - 1;
        if (row < rows && col < cost.cols()) {
            out.mapping[static_cast<std::size_t>(row)] = static_cast<int>(col);
            out.cost += cost(row, col);
        }
    }
    return out;
}

LabelMapping best_mapping(const ClusterAssignment& pred, const ClusterAssignment& truth) {
    const ContingencyTable t = contingency(pred, truth);
    LabelMapping map = hungarian(-t.counts.cast<double>());
    for (std::size_t r = 0; r < map.mapping.size(); ++r)
        if (map.mapping[r] >= 0) map.matched += t.counts(static_cast<Index>(r), map.mapping[r]);
    return map;
}

double accuracy(const ClusterAssignment& pred, const ClusterAssignment& truth) {
    check_lengths(pred, truth);
    if (pred.n() == 0) throw UsageError("accuracy: empty label vectors");
    return static_cast<double>(best_mapping(pred, truth).matched) /
           static_cast<double>(pred.n());
}

double entropy(const ClusterAssignment& labels) {
    if (labels.n() == 0) return 0.0;
    std::vector<long long> counts(static_cast<std::size_t>(labels.k), 0);
    for (int l : labels.labels) ++counts[static_cast<std::size_t>(l)];
    return plogp_sum(counts, labels.n());
}

double mutual_information(const ClusterAssignment& pred, const ClusterAssignment& truth) {
    const ContingencyTable t = contingency(pred, truth);
    if (t.n == 0) return 0.0;
    const auto row = t.counts.rowwise().sum();
    const auto col = t.counts.colwise().sum();
    const double n = static_cast<double>(t.n);
    // Terms are summed in sorted order so that swapping the arguments gives a
    // bitwise identical result.
    std::vector<double> terms;
    for (Index a = 0; a < t.counts.rows(); ++a) {
        for (Index b = 0; b < t.counts.cols(); ++b) {
            const long long c = t.counts(a, b);
            if (c == 0) continue;
            const double joint = static_cast<double>(c) / n;
            terms.push_back(joint * std::log2(static_cast<double>(c) * n /
                                              (static_cast<double>(row(a)) *
                                               static_cast<double>(col(b)))));
        }
    }
    std::sort(terms.begin(), terms.end());
    double mi = 0.0;
    for (double term : terms) mi += term;
    return std::max(0.0, mi);
}

double nmi(const ClusterAssignment& pred, const ClusterAssignment& truth) {
    check_lengths(pred, truth);
    const double denom = std::max(entropy(pred), entropy(truth));
    if (denom <= 0.0) return 0.0;
    // Partitions equal up to relabeling: MI equals both entropies, so the
    // ratio is exactly 1 even where the two sums round differently.
    const ContingencyTable t = contingency(pred, truth);
    const auto nonzero = (t.counts.array() != 0).cast<int>();
    if ((nonzero.rowwise().sum() <= 1).all() && (nonzero.colwise().sum() <= 1).all()) return 1.0;
    return mutual_information(pred, truth) / denom;
}

}  // namespace sssc::metrics
