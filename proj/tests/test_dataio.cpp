#include "sssc/dataio.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

using namespace sssc;
using namespace sssc::dataio;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& contents) {
    const auto path = std::filesystem::temp_directory_path() / ("sssc_test_" + name);
    std::ofstream(path) << contents;
    return path;
}

Index numerical_rank(const Matrix& m, double rel) {
    const Vector s = Eigen::JacobiSVD<Matrix>(m).singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > rel * s(0)) ++r;
    return r;
}

}  // namespace

TEST_CASE("load_csv layout and errors") {
    const auto zeros = load_csv(write_temp("zeros.csv", "0,0\n0,0\n0,0\n"));
    CHECK(zeros.m() == 2);
    CHECK(zeros.n() == 3);
    CHECK(zeros.values().isZero());

    const auto small = load_csv(write_temp("small.csv", "1,2\n3,4"));
    REQUIRE(small.m() == 2);
    REQUIRE(small.n() == 2);
    CHECK(small.values()(0, 0) == 1.0);
    CHECK(small.values()(1, 0) == 2.0);
    CHECK(small.values()(0, 1) == 3.0);
    CHECK(small.values()(1, 1) == 4.0);

    const auto header = load_csv(write_temp("header.csv", "a,b\n1.5, -2e3\n"), true);
    CHECK(header.n() == 1);
    CHECK(header.values()(1, 0) == -2000.0);

    try {
        load_csv(write_temp("bad.csv", "x,1\n2,3\n"));
        FAIL("expected a data error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
        CHECK(std::string(e.what()).find("column 1") != std::string::npos);
    }
    CHECK_THROWS_AS(load_csv(write_temp("ragged.csv", "1,2\n3\n")), DataError);
    CHECK_THROWS_AS(load_csv(write_temp("empty.csv", "")), DataError);
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), DataError);
    CHECK_THROWS_AS(load_csv(write_temp("nan.csv", "1,nan\n")), DataError);
}

TEST_CASE("csv and label files round-trip") {
    std::mt19937_64 rng(1);
    const DataMatrix d(testing::random_matrix(4, 9, rng));
    const auto path = std::filesystem::temp_directory_path() / "sssc_test_rt.csv";
    save_csv(path, d);
    CHECK(load_csv(path).values() == d.values());

    const auto lpath = std::filesystem::temp_directory_path() / "sssc_test_rt.labels";
    save_labels(lpath, {2, 0, 1, 1});
    const auto l = load_labels(lpath);
    CHECK(l.k == 3);
    CHECK(l.labels == std::vector<int>{2, 0, 1, 1});
    CHECK_THROWS_AS(load_labels(write_temp("badlabels", "1\n-1\n")), DataError);
}

TEST_CASE("pca_retain_energy") {
    std::mt19937_64 rng(2);
    const Vector u = testing::random_vector(6, rng);
    const Vector v = testing::random_vector(20, rng);
    const DataMatrix rank1(u * v.transpose());
    CHECK(pca_retain_energy(rank1, 0.98).m() == 1);

    // Full retention keeps every nonzero direction and reconstructs the centered data.
    const Matrix low = testing::random_matrix(8, 3, rng) * testing::random_matrix(3, 30, rng);
    const DataMatrix y(low);
    const DataMatrix full = pca_retain_energy(y, 1.0);
    const Matrix centered = low.colwise() - low.rowwise().mean();
    CHECK(full.m() == numerical_rank(centered, 1e-10));
    // Orthonormal projection: Gram matrices agree exactly when nothing is discarded.
    CHECK((full.values().transpose() * full.values() - centered.transpose() * centered).norm() <=
          1e-8 * centered.squaredNorm());

    // Energy threshold against the covariance spectrum computed independently.
    const Matrix r = testing::random_matrix(10, 50, rng);
    const Matrix rc = r.colwise() - r.rowwise().mean();
    Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(rc * rc.transpose()).eigenvalues().reverse();
    const double total = eig.sum();
    const Index d = pca_retain_energy(DataMatrix(r), 0.9).m();
    CHECK(eig.head(d).sum() / total >= 0.9);
    CHECK(eig.head(d - 1).sum() / total < 0.9);

    CHECK_THROWS_AS(pca_retain_energy(y, 0.0), UsageError);
    CHECK_THROWS_AS(pca_retain_energy(y, 1.5), UsageError);
}

TEST_CASE("uniform_split") {
    const auto all = uniform_split(5, 5, 123);
    CHECK(all.in_sample == std::vector<Index>{0, 1, 2, 3, 4});
    CHECK(all.out_of_sample.empty());

    const auto a = uniform_split(100, 30, 7);
    const auto b = uniform_split(100, 30, 7);
    CHECK(a.in_sample == b.in_sample);
    CHECK(a.out_of_sample == b.out_of_sample);

    CHECK_THROWS_AS(uniform_split(5, 6, 0), UsageError);
    CHECK_THROWS_AS(uniform_split(5, 0, 0), UsageError);
}

TEST_CASE("uniform_split partitions the index set (property)") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = std::uniform_int_distribution<Index>(1, 300)(rng);
        const Index p = std::uniform_int_distribution<Index>(1, n)(rng);
        const auto s = uniform_split(n, p, rng());
        REQUIRE(static_cast<Index>(s.in_sample.size()) == p);
        std::set<Index> all(s.in_sample.begin(), s.in_sample.end());
        all.insert(s.out_of_sample.begin(), s.out_of_sample.end());
        CHECK(static_cast<Index>(all.size()) == n);
        CHECK(*all.begin() == 0);
        CHECK(*all.rbegin() == n - 1);
    }
}

TEST_CASE("uniform_split inclusion frequency") {
    // Monte-Carlo: each index should be in-sample with probability p/n = 0.01.
    const Index n = 10000, p = 100;
    const int seeds = 200;
    std::vector<int> hits(static_cast<std::size_t>(n), 0);
    for (int s = 0; s < seeds; ++s)
        for (Index i : uniform_split(n, p, static_cast<std::uint64_t>(s)).in_sample) ++hits[static_cast<std::size_t>(i)];
    double mean = 0.0;
    for (int h : hits) mean += h;
    mean /= static_cast<double>(n) * seeds;
    CHECK(mean == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(std::abs(mean - 0.01) <= 0.005);
    // Per-index count is Binomial(200, 0.01); P(count outside {1, 2, 3}) is about 0.32,
    // so a systematically favored index set would push this well above half.
    int outside = 0;
    for (int h : hits) outside += std::abs(h / double(seeds) - 0.01) > 0.005 ? 1 : 0;
    CHECK(outside < n / 2);
}

TEST_CASE("synth_subspaces") {
    SynthParams sp;
    sp.k = 2;
    sp.ambient = 512;
    sp.dim_per = {5, 5};
    sp.points_per = {256, 256};
    sp.seed = 4;
    const auto ds = synth_subspaces(sp);
    CHECK(ds.data.n() == 512);
    CHECK(ds.data.m() == 512);
    CHECK(ds.truth.k == 2);

    for (Index j = 0; j < ds.data.n(); ++j) {
        const Matrix& b = ds.bases[static_cast<std::size_t>(ds.truth.labels[static_cast<std::size_t>(j)])];
        const Vector x = ds.data.values().col(j);
        CHECK((x - b * (b.transpose() * x)).norm() <= 1e-10);
        CHECK(x.norm() == doctest::Approx(1.0));
    }
    // Independence: rank of the union equals the sum of dimensions.
    CHECK(numerical_rank(ds.data.values(), 1e-8) == 10);

    sp.ambient = 50;
    sp.dim_per = {4, 6};
    sp.points_per = {100, 100};
    sp.corrupt_frac = 0.05;
    const auto bad = synth_subspaces(sp);
    CHECK(std::count(bad.corrupted.begin(), bad.corrupted.end(), true) == 10);

    sp.dim_per = {30, 30};
    CHECK_THROWS_AS(synth_subspaces(sp), UsageError);
    sp.dim_per = {4, 6};
    sp.points_per = {3, 100};
    CHECK_THROWS_AS(synth_subspaces(sp), UsageError);
}

TEST_CASE("in-sample columns spanning each subspace keep the rank") {
    SynthParams sp;
    sp.k = 3;
    sp.ambient = 40;
    sp.dim_per = {3, 4, 5};
    sp.points_per = {30, 30, 30};
    sp.seed = 8;
    const auto ds = synth_subspaces(sp);
    const Index full = numerical_rank(ds.data.values(), 1e-8);
    CHECK(full == 12);
    // The first dim_i columns of each block are generically independent.
    std::vector<Index> idx;
    Index offset = 0;
    for (int i = 0; i < 3; ++i) {
        for (int t = 0; t < sp.dim_per[i]; ++t) idx.push_back(offset + t);
        offset += sp.points_per[i];
    }
    CHECK(numerical_rank(ds.data.select(idx).values(), 1e-8) == full);
}
