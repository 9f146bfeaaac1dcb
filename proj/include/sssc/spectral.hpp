#pragma once

#include "sssc/types.hpp"

#include <cstdint>

namespace sssc::spectral {

struct SpectralEmbedding {
    /// n x k, orthonormal columns.
    Matrix V;
    /// Ascending.
    Vector eigenvalues;
};

enum class Eigensolver {
    dense,    ///< full symmetric eigendecomposition
    krylov,   ///< restarted block Lanczos with full reorthogonalization
    automatic ///< krylov when n > 4000, dense otherwise
};

struct KMeansResult {
    ClusterAssignment assignment;
    /// Within-cluster sum of squared distances.
    double objective = 0.0;
    Matrix centers;  // k x dim
    int iterations = 0;
};

struct SpectralOptions {
    int restarts = 20;
    std::uint64_t seed = 0;
    /// Scale each embedded row to unit length before k-means.
    bool normalize_rows = true;
    Eigensolver solver = Eigensolver::dense;
    int kmeans_max_iterations = 300;
    double kmeans_tol = 1e-9;
};

/// A = |C| + |C|^T.
Matrix build_affinity(const Matrix& c);

/// L = I - D^{-1/2} A D^{-1/2}. Vertices of zero degree get D^{-1/2}_ii = 0,
/// which leaves them isolated with L_ii = 1.
Matrix normalized_laplacian(const Matrix& a);

/// The k algebraically smallest eigenpairs of (L + L^T) / 2.
SpectralEmbedding smallest_eigenvectors(const Matrix& l, Index k,
                                        Eigensolver solver = Eigensolver::dense);

/// Lloyd iterations from k-means++ seeding on the rows of `points`, best of
/// `restarts` runs. Restart r draws from its own stream seeded by (seed, r),
/// so the result does not depend on how restarts are scheduled.
KMeansResult kmeans(const Matrix& points, int k, int restarts, std::uint64_t seed,
                    int max_iterations = 300, double tol = 1e-9);

/// Affinity -> normalized Laplacian -> bottom-k eigenvectors -> k-means.
/// Throws DataError when the affinity is identically zero.
ClusterAssignment spectral_cluster(const Matrix& c, int k, const SpectralOptions& opts = {});

}  // namespace sssc::spectral
