#include "sssc/oos.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace sssc::oos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void throw_unassignable(const std::vector<Index>& cols) {
    std::ostringstream msg;
    msg << cols.size() << " column(s) could not be assigned (zero code):";
    for (std::size_t i = 0; i < cols.size() && i < 10; ++i) msg << ' ' << cols[i];
    if (cols.size() > 10) msg << " ...";
    throw UnassignableError(msg.str());
}

void check_length(const ClassDictionary& dict, Index len) {
    if (len != dict.m())
        throw UsageError("sample has length " + std::to_string(len) + ", dictionary expects " +
                         std::to_string(dict.m()));
}

}  // namespace

ClassDictionary::ClassDictionary(DataMatrix x, ClusterAssignment labels, double gamma)
    : x_(std::move(x)), labels_(std::move(labels)), gamma_(gamma) {
    if (!(gamma_ > 0.0)) throw UsageError("dictionary: gamma must be positive");
    if (labels_.n() != x_.n())
        throw UsageError("dictionary: " + std::to_string(labels_.n()) + " labels for " +
                         std::to_string(x_.n()) + " columns");
    members_.resize(static_cast<std::size_t>(labels_.k));
    for (Index j = 0; j < labels_.n(); ++j)
        members_[static_cast<std::size_t>(labels_.labels[static_cast<std::size_t>(j)])].push_back(j);
    for (int c = 0; c < labels_.k; ++c)
        if (members_[static_cast<std::size_t>(c)].empty())
            throw DataError("dictionary: class " + std::to_string(c) + " has no in-sample columns");

    const Matrix& v = x_.values();
    Matrix gram = v.transpose() * v;
    gram.diagonal().array() += gamma_;
    const Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success)
        throw SolverError("dictionary: Cholesky factorization of X^T X + gamma I failed");
    projector_ = llt.solve(v.transpose());
}

ClassDictionary build_dictionary(const DataMatrix& x, const ClusterAssignment& labels,
                                 double gamma) {
    return ClassDictionary(x, labels, gamma);
}

Vector ridge_code(const ClassDictionary& dict, const Eigen::Ref<const Vector>& x) {
    check_length(dict, x.size());
    return dict.projector() * x;
}

Matrix ridge_codes(const ClassDictionary& dict, const Matrix& x_bar) {
    check_length(dict, x_bar.rows());
    return dict.projector() * x_bar;
}

Vector sparse_code_oos(const ClassDictionary& dict, const Eigen::Ref<const Vector>& x,
                       const sparse::SparseSelfRepConfig& cfg) {
    check_length(dict, x.size());
    return sparse::solve_lasso(dict.x().values(), x, cfg.lambda, cfg).coefficients;
}

Vector class_residuals(const ClassDictionary& dict, const Eigen::Ref<const Vector>& x,
                       const Eigen::Ref<const Vector>& c, bool regularized) {
    check_length(dict, x.size());
    if (c.size() != dict.p())
        throw UsageError("code has length " + std::to_string(c.size()) + ", dictionary has " +
                         std::to_string(dict.p()) + " columns");
    const Matrix& v = dict.x().values();
    Vector r(dict.k());
    for (int j = 0; j < dict.k(); ++j) {
        Vector recon = Vector::Zero(dict.m());
        double mass = 0.0;
        for (Index col : dict.members(j)) {
            recon += c(col) * v.col(col);
            mass += c(col) * c(col);
        }
        const double err = (x - recon).norm();
        if (!regularized)
            r(j) = err;
        else
            r(j) = mass > 0.0 ? err / std::sqrt(mass) : kInf;
    }
    return r;
}

int argmin_residual(const Vector& residuals) {
    int best = -1;
    for (Index j = 0; j < residuals.size(); ++j) {
        if (!std::isfinite(residuals(j))) continue;
        if (best < 0 || residuals(j) < residuals(best)) best = static_cast<int>(j);
    }
    if (best < 0) throw UnassignableError("every class residual is infinite (zero code)");
    return best;
}

Assignment assign(const ClassDictionary& dict, const Eigen::Ref<const Vector>& x,
                  const AssignOptions& opts) {
    Assignment out;
    out.coefficients = opts.mode == CodingMode::ridge ? ridge_code(dict, x)
                                                      : sparse_code_oos(dict, x, opts.sparse_cfg);
    out.residuals = class_residuals(dict, x, out.coefficients, opts.regularized);
    out.label = argmin_residual(out.residuals);
    return out;
}

ClusterAssignment classify_codes(const ClassDictionary& dict, const Matrix& x_bar,
                                 const Matrix& codes, bool regularized) {
    check_length(dict, x_bar.rows());
    if (codes.rows() != dict.p() || codes.cols() != x_bar.cols())
        throw UsageError("classify: code matrix shape does not match samples and dictionary");
    const Index cnt = x_bar.cols();
    const Matrix& v = dict.x().values();

    Matrix residuals(dict.k(), cnt);
    for (int j = 0; j < dict.k(); ++j) {
        const auto& mem = dict.members(j);
        const Index pj = static_cast<Index>(mem.size());
        Matrix xj(dict.m(), pj);
        Matrix cj(pj, cnt);
        for (Index t = 0; t < pj; ++t) {
            xj.col(t) = v.col(mem[static_cast<std::size_t>(t)]);
            cj.row(t) = codes.row(mem[static_cast<std::size_t>(t)]);
        }
        const Eigen::RowVectorXd err = (x_bar - xj * cj).colwise().norm();
        if (!regularized) {
            residuals.row(j) = err;
            continue;
        }
        const Eigen::RowVectorXd mass = cj.colwise().norm();
        for (Index i = 0; i < cnt; ++i)
            residuals(j, i) = mass(i) > 0.0 ? err(i) / mass(i) : kInf;
    }

    std::vector<int> labels(static_cast<std::size_t>(cnt), 0);
    std::vector<Index> failed;
    for (Index i = 0; i < cnt; ++i) {
        try {
            labels[static_cast<std::size_t>(i)] = argmin_residual(residuals.col(i));
        } catch (const UnassignableError&) {
            failed.push_back(i);
        }
    }
    if (!failed.empty()) throw_unassignable(failed);
    return ClusterAssignment(std::move(labels), dict.k());
}

ClusterAssignment assign_batch(const ClassDictionary& dict, const Matrix& x_bar,
                               const AssignOptions& opts) {
    if (x_bar.cols() == 0) return ClusterAssignment({}, dict.k());
    check_length(dict, x_bar.rows());
    if (opts.mode == CodingMode::ridge)
        return classify_codes(dict, x_bar, ridge_codes(dict, x_bar), opts.regularized);

    const Index cnt = x_bar.cols();
    Matrix codes(dict.p(), cnt);
    // Column 0 runs first so configuration errors surface outside the parallel region.
    codes.col(0) = sparse_code_oos(dict, x_bar.col(0), opts.sparse_cfg);
#pragma omp parallel for schedule(dynamic, 8)
    for (Index i = 1; i < cnt; ++i) codes.col(i) = sparse_code_oos(dict, x_bar.col(i), opts.sparse_cfg);
    return classify_codes(dict, x_bar, codes, opts.regularized);
}

ClusterAssignment assign_batch(const ClassDictionary& dict, const DataMatrix& x_bar,
                               const AssignOptions& opts) {
    return assign_batch(dict, x_bar.values(), opts);
}

}  // namespace sssc::oos
