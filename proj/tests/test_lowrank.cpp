#include "sssc/dataio.hpp"
#include "sssc/lowrank.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace sssc;
using namespace sssc::lowrank;

TEST_CASE("svt closed forms") {
    std::mt19937_64 rng(1);
    const Matrix m = testing::random_matrix(6, 4, rng);
    CHECK((svt(m, 0.0) - m).cwiseAbs().maxCoeff() <= 1e-10);

    const double smax = Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
    CHECK(svt(m, smax).isZero());
    CHECK(svt(m, 2.0 * smax).isZero());

    Vector u = testing::random_vector(5, rng), v = testing::random_vector(7, rng);
    u.normalize();
    v.normalize();
    const Matrix rank1 = 3.0 * u * v.transpose();
    CHECK((svt(rank1, 1.0) - 2.0 * u * v.transpose()).cwiseAbs().maxCoeff() <= 1e-10);

    CHECK_THROWS_AS(svt(m, -1.0), UsageError);
}

TEST_CASE("svt is nonexpansive (property)") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        const Matrix a = testing::random_matrix(5, 8, rng);
        const Matrix b = a + 0.3 * testing::random_matrix(5, 8, rng);
        const double tau = 0.1 * (t % 20);
        CHECK((svt(a, tau) - svt(b, tau)).norm() <= (a - b).norm() * (1.0 + 1e-12));
    }
}

TEST_CASE("svt_partial agrees with svt when the rank bound holds") {
    std::mt19937_64 rng(3);
    const Matrix low = testing::random_matrix(40, 3, rng) * testing::random_matrix(3, 30, rng);
    const Matrix noisy = low + 1e-3 * testing::random_matrix(40, 30, rng);
    const double tau = 0.1;
    CHECK((svt_partial(noisy, tau, 5) - svt(noisy, tau)).norm() <= 1e-8 * svt(noisy, tau).norm());
    CHECK_THROWS_AS(svt_partial(noisy, tau, 0), UsageError);
}

TEST_CASE("l21_shrink") {
    Matrix m(2, 3);
    m << 3.0, 0.1, 0.0, 4.0, 0.1, 0.0;
    const Matrix s = l21_shrink(m, 1.0);
    // Column 0 has norm 5 -> scaled by 4/5; column 1 lies in the dead zone.
    CHECK(s(0, 0) == doctest::Approx(2.4));
    CHECK(s(1, 0) == doctest::Approx(3.2));
    CHECK(s.col(1).isZero());
    CHECK(s.col(2).isZero());
    CHECK(l21_shrink(m, 0.0) == m);
    CHECK_THROWS_AS(l21_shrink(m, -0.1), UsageError);
}

TEST_CASE("l21_shrink equals the radial scalar prox") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        const Matrix m = testing::random_matrix(4, 6, rng);
        const Matrix s = l21_shrink(m, 0.5);
        for (Index j = 0; j < 6; ++j) {
            const double r = m.col(j).norm();
            const double shrunk = testing::radial_prox_by_search(r, 0.5);
            CHECK(s.col(j).norm() == doctest::Approx(shrunk).epsilon(1e-7));
            if (shrunk > 0.0) CHECK((s.col(j) / s.col(j).norm() - m.col(j) / r).norm() <= 1e-12);
            // Never increases a column norm.
            CHECK(s.col(j).norm() <= r);
        }
    }
}

TEST_CASE("error norm names") {
    CHECK(parse_error_norm("l21") == ErrorNorm::l21);
    CHECK(parse_error_norm("l1") == ErrorNorm::l1);
    CHECK(parse_error_norm("fro") == ErrorNorm::fro);
    CHECK(to_string(ErrorNorm::l21) == "l21");
    CHECK_THROWS_AS(parse_error_norm("l2"), UsageError);
}

TEST_CASE("solve_lrr noise-free independent subspaces") {
    dataio::SynthParams sp;
    sp.k = 2;
    sp.ambient = 50;
    sp.dim_per = {4, 4};
    sp.points_per = {40, 40};
    sp.seed = 9;
    const auto ds = dataio::synth_subspaces(sp);
    const LrrConfig cfg;
    const auto sol = solve_lrr(ds.data, cfg);
    REQUIRE(sol.report.converged);
    const double scale = sol.C.cwiseAbs().maxCoeff();
    double inter = 0.0;
    for (Index j = 0; j < 80; ++j)
        for (Index i = 0; i < 80; ++i)
            if (ds.truth.labels[static_cast<std::size_t>(i)] != ds.truth.labels[static_cast<std::size_t>(j)])
                inter = std::max(inter, std::abs(sol.C(i, j)) / scale);
    CHECK(inter <= 1e-4);
    CHECK(sol.E.norm() <= 1e-4);
    const Matrix& y = ds.data.values();
    CHECK((y - y * sol.C - sol.E).norm() <= cfg.constraint_tol * std::max(1.0, y.norm()));
}

TEST_CASE("solve_lrr recovers the shape interaction matrix") {
    std::mt19937_64 rng(5);
    const Index r = 4;
    const Matrix y = testing::random_matrix(20, r, rng) * testing::random_matrix(r, 35, rng);
    Index oracle_rank = 0;
    const Matrix vvt = testing::shape_interaction(y, &oracle_rank);
    REQUIRE(oracle_rank == r);
    // The oracle is feasible with nuclear norm exactly r.
    REQUIRE((y - y * vvt).norm() <= 1e-10 * y.norm());
    REQUIRE(nuclear_norm(vvt) == doctest::Approx(double(r)).epsilon(1e-10));

    LrrConfig cfg;
    cfg.lambda = 1e3;
    const auto sol = solve_lrr(DataMatrix(y), cfg);
    CHECK(sol.report.converged);
    CHECK(std::abs(nuclear_norm(sol.C) - double(r)) <= 0.01 * r);
    CHECK((y - y * sol.C).norm() <= 1e-6 * y.norm());
    CHECK((sol.C - vvt).norm() <= 1e-4);
}

TEST_CASE("solve_lrr error norm variants and partial SVD") {
    std::mt19937_64 rng(6);
    const Matrix low = testing::random_matrix(15, 3, rng) * testing::random_matrix(3, 25, rng);
    const Matrix y = low + 0.01 * testing::random_matrix(15, 25, rng);
    for (ErrorNorm norm : {ErrorNorm::l21, ErrorNorm::l1, ErrorNorm::fro}) {
        LrrConfig cfg;
        cfg.error_norm = norm;
        const auto sol = solve_lrr(DataMatrix(y), cfg);
        CHECK(sol.report.converged);
        CHECK((y - y * sol.C - sol.E).norm() <= cfg.constraint_tol * std::max(1.0, y.norm()));
    }
    LrrConfig full, partial;
    partial.rank_bound = 10;
    const auto a = solve_lrr(DataMatrix(low), full);
    const auto b = solve_lrr(DataMatrix(low), partial);
    CHECK((a.C - b.C).norm() <= 1e-5 * a.C.norm());
}

TEST_CASE("solve_lrr config validation") {
    const DataMatrix y(Matrix::Identity(3, 3));
    LrrConfig cfg;
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(solve_lrr(y, cfg), UsageError);
    cfg = {};
    cfg.rho = 1.0;
    CHECK_THROWS_AS(solve_lrr(y, cfg), UsageError);
    cfg = {};
    cfg.mu_init = 2e10;
    CHECK_THROWS_AS(solve_lrr(y, cfg), UsageError);
    CHECK_THROWS_AS(solve_lrr(DataMatrix(Matrix::Ones(3, 1)), LrrConfig{}), UsageError);

    cfg = {};
    cfg.max_iterations = 2;
    const auto capped = solve_lrr(y, cfg);
    CHECK_FALSE(capped.report.converged);
    CHECK(capped.report.iterations == 2);
}

TEST_CASE("outlier_columns and corruption lambda") {
    Matrix e = Matrix::Zero(3, 6);
    e.col(0) << 0.01, 0.0, 0.0;
    e.col(1) << 0.0, 0.02, 0.0;
    e.col(2) << 0.0, 0.0, 0.01;
    e.col(3) << 1.0, 1.0, 0.0;
    e.col(4) << 0.0, 0.01, 0.01;
    e.col(5) << 0.01, 0.0, 0.0;
    CHECK(outlier_columns(e) == std::vector<Index>{3});

    // Median zero: round-off-level columns are not reported.
    Matrix sparse_e = Matrix::Zero(3, 5);
    sparse_e(0, 1) = 1e-9;
    sparse_e(2, 4) = 0.8;
    CHECK(outlier_columns(sparse_e) == std::vector<Index>{4});
    CHECK(outlier_columns(Matrix::Zero(3, 4)).empty());

    const Matrix x = 2.0 * Matrix::Identity(4, 4);
    CHECK(corruption_lambda(x, 0.25) == doctest::Approx(3.0 / (7.0 * 2.0 * 1.0)));
    CHECK_THROWS_AS(corruption_lambda(x, 0.0), UsageError);
}

TEST_CASE("solve_lrr flags planted outlier columns") {
    dataio::SynthParams sp;
    sp.k = 2;
    sp.ambient = 50;
    sp.dim_per = {4, 4};
    sp.points_per = {250, 250};
    sp.corrupt_frac = 0.05;
    sp.seed = 21;
    const auto ds = dataio::synth_subspaces(sp);
    LrrConfig cfg;
    cfg.lambda = corruption_lambda(ds.data.values(), sp.corrupt_frac);
    const auto sol = solve_lrr(ds.data, cfg);
    std::vector<Index> planted;
    for (std::size_t i = 0; i < ds.corrupted.size(); ++i)
        if (ds.corrupted[i]) planted.push_back(static_cast<Index>(i));
    CHECK(outlier_columns(sol.E) == planted);
}
