#include "sssc/sparse_coding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace sssc::sparse {

namespace {

constexpr double kSnapZero = 1e-12;
constexpr int kKktCheckEvery = 5;

void check_config(const SparseSelfRepConfig& cfg, double lambda) {
    if (!(lambda > 0.0)) throw UsageError("lasso: lambda must be positive");
    if (!(cfg.delta >= 0.0)) throw UsageError("lasso: delta must be nonnegative");
    if (!(cfg.kkt_tol > 0.0)) throw UsageError("lasso: kkt_tol must be positive");
    if (cfg.max_iterations < 1) throw UsageError("lasso: max_iterations must be positive");
}

void soft_threshold_into(const Vector& v, double tau, Vector& out) {
    out = v.unaryExpr([tau](double x) { return soft_threshold(x, tau); });
}

// Moves x along null directions of its support columns (D x unchanged,
// ||x||_1 not increased) until those columns are linearly independent.
void reduce_to_independent_support(const Eigen::Ref<const Matrix>& dict, Vector& x) {
    for (;;) {
        std::vector<Index> support;
        for (Index j = 0; j < x.size(); ++j)
            if (x(j) != 0.0) support.push_back(j);
        const Index s = static_cast<Index>(support.size());
        if (s == 0) return;
        Matrix ds(dict.rows(), s);
        for (Index i = 0; i < s; ++i) ds.col(i) = dict.col(support[static_cast<std::size_t>(i)]);
        const Eigen::JacobiSVD<Matrix> svd(ds, Eigen::ComputeFullV);
        const Vector& sv = svd.singularValues();
        const double smallest = s > ds.rows() ? 0.0 : sv(s - 1);
        if (smallest > 1e-10 * sv(0)) return;
        Vector v = svd.matrixV().col(s - 1);
        double slope = 0.0;
        for (Index i = 0; i < s; ++i)
            slope += (x(support[static_cast<std::size_t>(i)]) > 0.0 ? 1.0 : -1.0) * v(i);
        if (slope > 0.0) v = -v;
        // First coefficient driven to zero along v.
        double t_min = std::numeric_limits<double>::infinity();
        Index hit = -1;
        for (Index i = 0; i < s; ++i) {
            const double c = x(support[static_cast<std::size_t>(i)]);
            if (c * v(i) < 0.0 && -c / v(i) < t_min) {
                t_min = -c / v(i);
                hit = i;
            }
        }
        if (hit < 0) return;
        for (Index i = 0; i < s; ++i) x(support[static_cast<std::size_t>(i)]) += t_min * v(i);
        x(support[static_cast<std::size_t>(hit)]) = 0.0;
    }
}

// Given the sign pattern of an iterate with independent support columns, the
// minimizer restricted to that support solves D_S^T D_S c = D_S^T y - w s.
// Returns false when the solution flips a sign.
bool solve_on_support(const Eigen::Ref<const Matrix>& dict, const Eigen::Ref<const Vector>& y,
                      Vector x, double w, Vector& out) {
    reduce_to_independent_support(dict, x);
    std::vector<Index> support;
    for (Index j = 0; j < x.size(); ++j)
        if (x(j) != 0.0) support.push_back(j);
    const Index s = static_cast<Index>(support.size());
    if (s == 0 || s > dict.rows()) return false;
    Matrix ds(dict.rows(), s);
    Vector signs(s);
    for (Index i = 0; i < s; ++i) {
        ds.col(i) = dict.col(support[static_cast<std::size_t>(i)]);
        signs(i) = x(support[static_cast<std::size_t>(i)]) > 0.0 ? 1.0 : -1.0;
    }
    const Eigen::LLT<Matrix> llt(ds.transpose() * ds);
    if (llt.info() != Eigen::Success) return false;
    const Vector cs = llt.solve(ds.transpose() * y - w * signs);
    if (!cs.allFinite()) return false;
    for (Index i = 0; i < s; ++i)
        if (cs(i) * signs(i) <= 0.0) return false;
    out = Vector::Zero(x.size());
    for (Index i = 0; i < s; ++i) out(support[static_cast<std::size_t>(i)]) = cs(i);
    return true;
}

}  // namespace

double spectral_norm_squared(const Eigen::Ref<const Matrix>& dict, int iterations, double tol) {
    const Index p = dict.cols();
    if (p == 0 || dict.rows() == 0) return 0.0;

    // Fixed-seed start so repeated calls on the same dictionary agree bitwise.
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(p);
    for (Index i = 0; i < p; ++i) v(i) = normal(rng);
    v.normalize();

    double estimate = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const Vector w = dict.transpose() * (dict * v);
        const double next = w.norm();
        if (next == 0.0) return 0.0;
        v = w / next;
        const bool done = std::abs(next - estimate) <= tol * next;
        estimate = next;
        if (done) break;
    }
    return estimate;
}

double lasso_objective(const Eigen::Ref<const Matrix>& dict, const Eigen::Ref<const Vector>& y,
                       const Eigen::Ref<const Vector>& c, double lambda) {
    return lambda * (y - dict * c).squaredNorm() + c.lpNorm<1>();
}

double kkt_violation(const Eigen::Ref<const Matrix>& dict, const Eigen::Ref<const Vector>& y,
                     const Eigen::Ref<const Vector>& c, double lambda) {
    const double w = l1_weight(lambda);
    const Vector g = dict.transpose() * (dict * c - y);
    double worst = 0.0;
    for (Index j = 0; j < c.size(); ++j) {
        double v;
        if (c(j) > 0.0)
            v = std::abs(g(j) + w);
        else if (c(j) < 0.0)
            v = std::abs(g(j) - w);
        else
            v = std::max(0.0, std::abs(g(j)) - w);
        worst = std::max(worst, v / w);
    }
    return worst;
}

SparseCode solve_lasso(const Eigen::Ref<const Matrix>& dict, const Eigen::Ref<const Vector>& y,
                       double lambda, const SparseSelfRepConfig& cfg) {
    check_config(cfg, lambda);
    if (dict.rows() != y.size())
        throw UsageError("lasso: dictionary has " + std::to_string(dict.rows()) +
                         " rows but signal has length " + std::to_string(y.size()));

    const Index p = dict.cols();
    const double w = l1_weight(lambda);
    SparseCode out;
    out.coefficients = Vector::Zero(p);

    const double y_norm = y.norm();
    double lipschitz = spectral_norm_squared(dict);
    if (y_norm == 0.0 || (cfg.delta > 0.0 && y_norm <= cfg.delta) || lipschitz == 0.0) {
        out.report.converged = true;
        out.report.residual_norm = y_norm;
        out.report.objective = lambda * y_norm * y_norm;
        out.report.kkt_violation = p ? kkt_violation(dict, y, out.coefficients, lambda) : 0.0;
        // A zero dictionary cannot reduce the residual: c = 0 is optimal
        // even when the fit tolerance is not met.
        return out;
    }

    Vector x = Vector::Zero(p);
    Vector x_prev = x;
    Vector z = x;
    Vector dx = Vector::Zero(dict.rows());
    Vector dx_prev = dx;
    Vector dz = dx;
    Vector x_new(p), grad(p), step(p);
    double t = 1.0;

    Vector best = x;
    double best_obj = lambda * y_norm * y_norm;
    double residual = y_norm;
    double kkt = 0.0;
    bool converged = false;
    int it = 0;
    Eigen::VectorXi last_signs;

    while (it < cfg.max_iterations) {
        ++it;
        const Vector rz = dz - y;
        grad.noalias() = dict.transpose() * rz;
        const double fz = 0.5 * rz.squaredNorm();

        Vector dx_new;
        for (;;) {
            step = z - grad / lipschitz;
            soft_threshold_into(step, w / lipschitz, x_new);
            dx_new.noalias() = dict * x_new;
            const Vector diff = x_new - z;
            const double f_new = 0.5 * (dx_new - y).squaredNorm();
            const double model = fz + grad.dot(diff) + 0.5 * lipschitz * diff.squaredNorm();
            if (f_new <= model + 1e-12 * (1.0 + fz)) break;
            lipschitz *= 2.0;
        }

        // Gradient-based adaptive restart of the momentum sequence.
        const bool restart = (z - x_new).dot(x_new - x) > 0.0;
        double beta = 0.0;
        if (restart) {
            t = 1.0;
        } else {
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            beta = (t - 1.0) / t_next;
            t = t_next;
        }

        x_prev.swap(x);
        x.swap(x_new);
        dx_prev.swap(dx);
        dx = std::move(dx_new);
        z = x + beta * (x - x_prev);
        dz = dx + beta * (dx - dx_prev);

        residual = (y - dx).norm();
        const double obj = lambda * residual * residual + x.lpNorm<1>();
        if (obj < best_obj) {
            best_obj = obj;
            best = x;
        }

        if (cfg.delta > 0.0 && residual <= cfg.delta) {
            best = x;
            converged = true;
            break;
        }
        if (it % kKktCheckEvery == 0) {
            kkt = kkt_violation(dict, y, x, lambda);
            if (kkt <= cfg.kkt_tol) {
                best = x;
                converged = true;
                break;
            }
            // Once the iterate has found the right signs the restricted
            // problem is a linear solve; accept it if it is optimal.
            // Only worth trying once the sign pattern has stopped changing.
            Eigen::VectorXi signs(p);
            for (Index j = 0; j < p; ++j) signs(j) = (x(j) > 0.0) - (x(j) < 0.0);
            const bool stable = signs == last_signs;
            last_signs = std::move(signs);
            Vector polished;
            if (stable && static_cast<Index>(last_signs.cwiseAbs().sum()) <= dict.rows() &&
                solve_on_support(dict, y, x, w, polished)) {
                const double pkkt = kkt_violation(dict, y, polished, lambda);
                if (pkkt <= cfg.kkt_tol) {
                    kkt = pkkt;
                    best = std::move(polished);
                    converged = true;
                    break;
                }
            }
        }
    }

    for (Index j = 0; j < p; ++j) {
        if (std::abs(best(j)) < kSnapZero)
            best(j) = 0.0;
        else
            out.support.push_back(j);
    }
    out.coefficients = std::move(best);
    const Vector r = y - dict * out.coefficients;
    out.report.iterations = it;
    out.report.residual_norm = r.norm();
    out.report.objective = lambda * r.squaredNorm() + out.coefficients.lpNorm<1>();
    out.report.kkt_violation = kkt_violation(dict, y, out.coefficients, lambda);
    out.report.converged = converged;
    return out;
}

SelfRepresentation sparse_self_representation(const DataMatrix& y,
                                              const SparseSelfRepConfig& cfg) {
    check_config(cfg, cfg.lambda);
    const Matrix& values = y.values();
    const Index n = values.cols();
    if (n < 2) throw UsageError("self-representation needs at least two samples");

    SelfRepresentation out;
    out.C = Matrix::Zero(n, n);
    out.reports.resize(static_cast<std::size_t>(n));

    Index failed_col = -1;
    std::string failure;

#pragma omp parallel
    {
        Matrix dict = values;
#pragma omp for schedule(dynamic, 4)
        for (Index i = 0; i < n; ++i) {
            try {
                dict.col(i).setZero();
                SparseCode code = solve_lasso(dict, values.col(i), cfg.lambda, cfg);
                dict.col(i) = values.col(i);
                code.coefficients(i) = 0.0;
                out.C.col(i) = code.coefficients;
                out.reports[static_cast<std::size_t>(i)] = code.report;
            } catch (const std::exception& e) {
                dict.col(i) = values.col(i);
#pragma omp critical(sssc_selfrep_error)
                {
                    if (failed_col < 0 || i < failed_col) {
                        failed_col = i;
                        failure = e.what();
                    }
                }
            }
        }
    }
    if (failed_col >= 0)
        throw SolverError("self-representation failed at column " + std::to_string(failed_col) +
                          ": " + failure);
    return out;
}

}  // namespace sssc::sparse
