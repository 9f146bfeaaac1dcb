#include "sssc/lowrank.hpp"

#include "sssc/sparse_coding.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace sssc::lowrank {

namespace {

struct ThinSvd {
    Matrix u;
    Vector s;
    Matrix v;
};

ThinSvd thin_svd(const Matrix& m) {
    if (!m.allFinite()) throw SolverError("svd: non-finite input");
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() == Eigen::Success && svd.singularValues().allFinite() &&
        svd.matrixU().allFinite() && svd.matrixV().allFinite())
        return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
    // The divide-and-conquer SVD occasionally breaks down (failure or NaN
    // factors) on matrices with clustered singular values; one-sided Jacobi
    // is slower but robust.
    Eigen::JacobiSVD<Matrix> jacobi(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (jacobi.info() != Eigen::Success) throw SolverError("svd: decomposition failed");
    return {jacobi.matrixU(), jacobi.singularValues(), jacobi.matrixV()};
}

Vector singular_values(const Matrix& m) {
    if (!m.allFinite()) throw SolverError("svd: non-finite input");
    Eigen::BDCSVD<Matrix> svd(m);
    if (svd.info() == Eigen::Success && svd.singularValues().allFinite()) return svd.singularValues();
    return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

Matrix shrink_svd(const Matrix& u, const Vector& s, const Matrix& v, double tau,
                  double* nuclear = nullptr) {
    Index keep = 0;
    while (keep < s.size() && s(keep) > tau) ++keep;
    const Vector shrunk = (s.head(keep).array() - tau).matrix();
    if (nuclear) *nuclear = shrunk.sum();
    return u.leftCols(keep) * shrunk.asDiagonal() * v.leftCols(keep).transpose();
}

Matrix svt_impl(const Matrix& m, double tau, Index rank_bound, double* nuclear) {
    if (!(tau >= 0.0)) throw UsageError("svt: tau must be nonnegative");
    if (m.size() == 0) {
        if (nuclear) *nuclear = 0.0;
        return m;
    }
    if (rank_bound > 0 && rank_bound + 10 < std::min(m.rows(), m.cols())) {
        const Index l = rank_bound + 10;
        std::mt19937_64 rng(0xc0ffee);
        std::normal_distribution<double> normal(0.0, 1.0);
        Matrix omega(m.cols(), l);
        for (Index j = 0; j < l; ++j)
            for (Index i = 0; i < m.cols(); ++i) omega(i, j) = normal(rng);
        Matrix q = Eigen::HouseholderQR<Matrix>(m * omega).householderQ() *
                   Matrix::Identity(m.rows(), l);
        for (int it = 0; it < 2; ++it) {
            const Matrix z = Eigen::HouseholderQR<Matrix>(m.transpose() * q).householderQ() *
                             Matrix::Identity(m.cols(), l);
            q = Eigen::HouseholderQR<Matrix>(m * z).householderQ() * Matrix::Identity(m.rows(), l);
        }
        const Matrix b = q.transpose() * m;
        const ThinSvd svd = thin_svd(b);
        const Vector s = svd.s.head(std::min<Index>(rank_bound, svd.s.size()));
        return shrink_svd(q * svd.u, s, svd.v, tau, nuclear);
    }
    const ThinSvd svd = thin_svd(m);
    return shrink_svd(svd.u, svd.s, svd.v, tau, nuclear);
}

double error_penalty(const Matrix& e, ErrorNorm norm) {
    switch (norm) {
        case ErrorNorm::l21: return e.colwise().norm().sum();
        case ErrorNorm::l1: return e.lpNorm<1>();
        case ErrorNorm::fro: return e.squaredNorm();
    }
    return 0.0;
}

Matrix error_prox(const Matrix& m, double tau, ErrorNorm norm) {
    switch (norm) {
        case ErrorNorm::l21: return l21_shrink(m, tau);
        case ErrorNorm::l1:
            return m.unaryExpr([tau](double x) { return sparse::soft_threshold(x, tau); });
        case ErrorNorm::fro: return m / (1.0 + 2.0 * tau);
    }
    return m;
}

}  // namespace

ErrorNorm parse_error_norm(std::string_view name) {
    if (name == "l21") return ErrorNorm::l21;
    if (name == "l1") return ErrorNorm::l1;
    if (name == "fro") return ErrorNorm::fro;
    throw UsageError("unknown error norm '" + std::string(name) + "' (expected l21, l1 or fro)");
}

std::string_view to_string(ErrorNorm norm) {
    switch (norm) {
        case ErrorNorm::l21: return "l21";
        case ErrorNorm::l1: return "l1";
        case ErrorNorm::fro: return "fro";
    }
    return "?";
}

Matrix svt(const Matrix& m, double tau) { return svt_impl(m, tau, 0, nullptr); }

Matrix svt_partial(const Matrix& m, double tau, Index rank) {
    if (rank < 1) throw UsageError("svt_partial: rank must be positive");
    return svt_impl(m, tau, rank, nullptr);
}

Matrix l21_shrink(const Matrix& m, double tau) {
    if (!(tau >= 0.0)) throw UsageError("l21_shrink: tau must be nonnegative");
    Matrix out = m;
    for (Index j = 0; j < m.cols(); ++j) {
        const double nrm = m.col(j).norm();
        if (nrm <= tau)
            out.col(j).setZero();
        else
            out.col(j) *= (1.0 - tau / nrm);
    }
    return out;
}

double nuclear_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return singular_values(m).sum();
}

LrrSolution solve_lrr(const DataMatrix& data, const LrrConfig& cfg) {
    if (!(cfg.lambda > 0.0)) throw UsageError("lrr: lambda must be positive");
    if (!(cfg.rho > 1.0)) throw UsageError("lrr: rho must exceed 1");
    if (!(cfg.mu_init > 0.0 && cfg.mu_init < cfg.mu_max))
        throw UsageError("lrr: need 0 < mu_init < mu_max");
    if (!(cfg.constraint_tol > 0.0)) throw UsageError("lrr: constraint_tol must be positive");
    if (cfg.max_iterations < 1) throw UsageError("lrr: max_iterations must be positive");

    const Matrix& y = data.values();
    const Index n = y.cols();
    if (n < 2) throw UsageError("lrr: need at least two samples");

    const Matrix yty = y.transpose() * y;
    const Eigen::LLT<Matrix> factor(Matrix::Identity(n, n) + yty);
    if (factor.info() != Eigen::Success) throw SolverError("lrr: factorization of I + Y^T Y failed");

    const double scale = std::max(1.0, y.norm());
    Matrix c = Matrix::Zero(n, n);
    Matrix j = Matrix::Zero(n, n);
    Matrix e = Matrix::Zero(y.rows(), n);
    Matrix mult_data = Matrix::Zero(y.rows(), n);  // multiplier for Y = YC + E
    Matrix mult_split = Matrix::Zero(n, n);        // multiplier for C = J
    double mu = cfg.mu_init;

    LrrSolution out;
    double nuclear = 0.0;
    double r_data = 0.0;
    double r_split = 0.0;
    int it = 0;
    bool converged = false;
    while (it < cfg.max_iterations) {
        ++it;
        j = svt_impl(c + mult_split / mu, 1.0 / mu, cfg.rank_bound, &nuclear);
        c = factor.solve(yty - y.transpose() * e + j +
                         (y.transpose() * mult_data - mult_split) / mu);
        const Matrix yc = y * c;
        e = error_prox(y - yc + mult_data / mu, cfg.lambda / mu, cfg.error_norm);

        const Matrix gap_data = y - yc - e;
        const Matrix gap_split = c - j;
        r_data = gap_data.norm() / scale;
        r_split = gap_split.norm() / scale;
        if (r_data < cfg.constraint_tol && r_split < cfg.constraint_tol) {
            converged = true;
            break;
        }
        mult_data += mu * gap_data;
        mult_split += mu * gap_split;
        mu = std::min(cfg.rho * mu, cfg.mu_max);
    }

    out.report.iterations = it;
    out.report.residual_norm = std::max(r_data, r_split);
    out.report.objective = nuclear + cfg.lambda * error_penalty(e, cfg.error_norm);
    out.report.converged = converged;
    out.C = std::move(c);
    out.E = std::move(e);
    return out;
}

std::vector<Index> outlier_columns(const Matrix& e, double factor) {
    std::vector<Index> out;
    const Index n = e.cols();
    if (n == 0) return out;
    const Eigen::RowVectorXd norms = e.colwise().norm();
    std::vector<double> sorted(norms.data(), norms.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    const double median =
        sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    // When most columns are exactly zero the median is zero too; columns at
    // round-off level relative to the largest are then not counted.
    const double threshold = std::max(factor * median, 1e-6 * sorted.back());
    for (Index j = 0; j < n; ++j)
        if (norms(j) > threshold) out.push_back(j);
    return out;
}

double corruption_lambda(const Matrix& x, double outlier_fraction) {
    if (!(outlier_fraction > 0.0)) throw UsageError("corruption_lambda: fraction must be positive");
    const double spectral = x.size() == 0 ? 0.0 : singular_values(x)(0);
    if (spectral == 0.0) throw DataError("corruption_lambda: zero data matrix");
    return 3.0 / (7.0 * spectral * std::sqrt(outlier_fraction * static_cast<double>(x.cols())));
}

}  // namespace sssc::lowrank
