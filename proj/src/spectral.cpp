#include "sssc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace sssc::spectral {

namespace {

constexpr Index kKrylovThreshold = 4000;

std::mt19937_64 restart_stream(std::uint64_t seed, int restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart), 0x6b6du};
    return std::mt19937_64(seq);
}

// Appends the part of `v` orthogonal to q.leftCols(cols) as a new column of q.
// Returns false when nothing independent is left.
bool append_orthogonal(Matrix& q, Index& cols, Vector v) {
    const double original = v.norm();
    if (original == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass) {
        if (cols > 0) v -= q.leftCols(cols) * (q.leftCols(cols).transpose() * v);
    }
    const double nrm = v.norm();
    if (nrm <= 1e-10 * original) return false;
    q.col(cols++) = v / nrm;
    return true;
}

SpectralEmbedding dense_smallest(const Matrix& sym, Index k) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.info() != Eigen::Success) throw SolverError("symmetric eigendecomposition failed");
    return {eig.eigenvectors().leftCols(k), eig.eigenvalues().head(k)};
}

SpectralEmbedding krylov_smallest(const Matrix& sym, Index k) {
    const Index n = sym.rows();
    const Index block = std::min<Index>(n, k + 8);
    constexpr int steps = 5;
    if (block * (steps + 1) * 2 >= n) return dense_smallest(sym, k);

    const double scale = std::max(1.0, sym.cwiseAbs().rowwise().sum().maxCoeff());
    std::mt19937_64 rng(0x1a2c05);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix start(n, block);
    for (Index j = 0; j < block; ++j)
        for (Index i = 0; i < n; ++i) start(i, j) = normal(rng);

    for (int cycle = 0; cycle < 200; ++cycle) {
        Matrix q(n, block * (steps + 1));
        Index cols = 0;
        Matrix current = start;
        for (int s = 0; s <= steps; ++s) {
            const Index first = cols;
            for (Index j = 0; j < current.cols(); ++j) append_orthogonal(q, cols, current.col(j));
            if (cols == first || s == steps) break;
            current = sym * q.middleCols(first, cols - first);
        }
        const Matrix basis = q.leftCols(cols);
        const Matrix lq = sym * basis;
        Matrix t = basis.transpose() * lq;
        t = 0.5 * (t + t.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(t);
        if (eig.info() != Eigen::Success) throw SolverError("Rayleigh-Ritz eigensolve failed");

        const Index want = std::min(cols, block);
        if (want < k) {
            // Krylov space exhausted before k directions were found; top up with fresh vectors.
            for (Index j = 0; j < block; ++j)
                for (Index i = 0; i < n; ++i) start(i, j) = normal(rng);
            start.leftCols(want) = basis * eig.eigenvectors().leftCols(want);
            continue;
        }
        const Matrix ritz = basis * eig.eigenvectors().leftCols(want);
        const Matrix l_ritz = lq * eig.eigenvectors().leftCols(k);
        const Vector theta = eig.eigenvalues().head(k);
        const Matrix resid = l_ritz - ritz.leftCols(k) * theta.asDiagonal();
        if (resid.colwise().norm().maxCoeff() <= 1e-10 * scale) return {ritz.leftCols(k), theta};
        start.leftCols(want) = ritz;
        for (Index j = want; j < block; ++j)
            for (Index i = 0; i < n; ++i) start(i, j) = normal(rng);
    }
    throw SolverError("block Krylov eigensolver did not converge");
}

double squared_distance(const Matrix& points, Index row, const Matrix& centers, Index c) {
    return (points.row(row) - centers.row(c)).squaredNorm();
}

KMeansResult kmeans_once(const Matrix& points, int k, std::mt19937_64& rng, int max_iterations,
                         double tol) {
    const Index n = points.rows();
    const Index dim = points.cols();
    Matrix centers(k, dim);

    // k-means++ seeding.
    std::uniform_int_distribution<Index> first(0, n - 1);
    centers.row(0) = points.row(first(rng));
    Vector closest(n);
    for (Index i = 0; i < n; ++i) closest(i) = squared_distance(points, i, centers, 0);
    for (int c = 1; c < k; ++c) {
        const double total = closest.sum();
        Index chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            chosen = n - 1;
            for (Index i = 0; i < n; ++i) {
                target -= closest(i);
                if (target < 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = first(rng);
        }
        centers.row(c) = points.row(chosen);
        for (Index i = 0; i < n; ++i)
            closest(i) = std::min(closest(i), squared_distance(points, i, centers, c));
    }

    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    Vector dist(n);
    double objective = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < max_iterations; ++it) {
        for (Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_distance(points, i, centers, 0);
            for (int c = 1; c < k; ++c) {
                const double d = squared_distance(points, i, centers, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            labels[static_cast<std::size_t>(i)] = best;
            dist(i) = best_d;
        }

        // Refill empty clusters with the point farthest from its center.
        std::vector<Index> counts(static_cast<std::size_t>(k), 0);
        for (int l : labels) ++counts[static_cast<std::size_t>(l)];
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            Index far = -1;
            for (Index i = 0; i < n; ++i) {
                if (counts[static_cast<std::size_t>(labels[i])] < 2) continue;
                if (far < 0 || dist(i) > dist(far)) far = i;
            }
            --counts[static_cast<std::size_t>(labels[far])];
            labels[static_cast<std::size_t>(far)] = c;
            ++counts[static_cast<std::size_t>(c)];
            dist(far) = 0.0;
        }

        centers.setZero();
        for (Index i = 0; i < n; ++i) centers.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
        for (int c = 0; c < k; ++c) centers.row(c) /= static_cast<double>(counts[c]);

        double next = 0.0;
        for (Index i = 0; i < n; ++i)
            next += squared_distance(points, i, centers, labels[static_cast<std::size_t>(i)]);
        const bool done = std::isfinite(objective) &&
                          std::abs(objective - next) <= tol * std::max(objective, 1e-300);
        objective = next;
        if (done) {
            ++it;
            break;
        }
    }

    KMeansResult out;
    out.assignment = ClusterAssignment(std::move(labels), k);
    out.objective = objective;
    out.centers = std::move(centers);
    out.iterations = it;
    return out;
}

}  // namespace

Matrix build_affinity(const Matrix& c) {
    if (c.rows() != c.cols())
        throw UsageError("affinity: coefficient matrix must be square, got " +
                         std::to_string(c.rows()) + "x" + std::to_string(c.cols()));
    const Matrix a = c.cwiseAbs();
    return a + a.transpose();
}

Matrix normalized_laplacian(const Matrix& a) {
    const Index n = a.rows();
    Vector inv_sqrt(n);
    for (Index i = 0; i < n; ++i) {
        const double d = a.row(i).sum();
        inv_sqrt(i) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    }
    Matrix l(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            l(i, j) = (i == j ? 1.0 : 0.0) - a(i, j) * (inv_sqrt(i) * inv_sqrt(j));
    return l;
}

SpectralEmbedding smallest_eigenvectors(const Matrix& l, Index k, Eigensolver solver) {
    const Index n = l.rows();
    if (l.cols() != n) throw UsageError("eigenvectors: matrix must be square");
    if (k < 1 || k > n)
        throw UsageError("eigenvectors: need 1 <= k <= n, got k=" + std::to_string(k) +
                         ", n=" + std::to_string(n));
    const double asym = (l - l.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * std::max(1.0, l.cwiseAbs().maxCoeff()))
        throw UsageError("eigenvectors: matrix is not symmetric");
    const Matrix sym = 0.5 * (l + l.transpose());

    const bool use_krylov = solver == Eigensolver::krylov ||
                            (solver == Eigensolver::automatic && n > kKrylovThreshold);
    return use_krylov ? krylov_smallest(sym, k) : dense_smallest(sym, k);
}

KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed,
                    int max_iterations, double tol) {
    if (k < 1) throw UsageError("kmeans: k must be at least 1");
    if (points.rows() < k)
        throw UsageError("kmeans: " + std::to_string(points.rows()) + " points cannot form " +
                         std::to_string(k) + " clusters");
    if (restarts < 1) throw UsageError("kmeans: restarts must be at least 1");
    if (max_iterations < 1) throw UsageError("kmeans: max_iterations must be at least 1");
    if (!points.allFinite()) throw DataError("kmeans: non-finite point coordinates");

    std::vector<KMeansResult> runs(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < restarts; ++r) {
        auto rng = restart_stream(seed, r);
        runs[static_cast<std::size_t>(r)] = kmeans_once(points, k, rng, max_iterations, tol);
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].objective < runs[best].objective) best = r;
    return std::move(runs[best]);
}

ClusterAssignment spectral_cluster(const Matrix& c, int k, const SpectralOptions& opts) {
    const Matrix a = build_affinity(c);
    if (k < 1 || k > a.rows())
        throw UsageError("spectral clustering: need 1 <= k <= n");
    if (a.maxCoeff() <= 0.0)
        throw DataError("spectral clustering: affinity matrix is identically zero "
                        "(every representation coefficient vanished)");
    const Matrix l = normalized_laplacian(a);
    SpectralEmbedding emb = smallest_eigenvectors(l, k, opts.solver);
    if (opts.normalize_rows) {
        for (Index i = 0; i < emb.V.rows(); ++i) {
            const double nrm = emb.V.row(i).norm();
            if (nrm > 0.0) emb.V.row(i) /= nrm;
        }
    }
    return kmeans(emb.V, k, opts.restarts, opts.seed, opts.kmeans_max_iterations, opts.kmeans_tol)
        .assignment;
}

}  // namespace sssc::spectral
