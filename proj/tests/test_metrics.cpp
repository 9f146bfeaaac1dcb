#include "sssc/metrics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace sssc;
using namespace sssc::metrics;

namespace {

ClusterAssignment labels_of(std::vector<int> v) {
    int k = 0;
    for (int l : v) k = std::max(k, l + 1);
    return ClusterAssignment(std::move(v), k);
}

ClusterAssignment random_partition(int n, int k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    std::vector<int> v(static_cast<std::size_t>(n));
    for (auto& l : v) l = pick(rng);
    return ClusterAssignment(std::move(v), k);
}

ClusterAssignment relabel(const ClusterAssignment& a, std::mt19937_64& rng) {
    std::vector<int> perm(static_cast<std::size_t>(a.k));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> out;
    for (int l : a.labels) out.push_back(perm[static_cast<std::size_t>(l)]);
    return ClusterAssignment(std::move(out), a.k);
}

}  // namespace

TEST_CASE("contingency counts") {
    const auto t = contingency(labels_of({0, 0, 1, 1}), labels_of({0, 0, 1, 1}));
    CHECK(t.counts(0, 0) == 2);
    CHECK(t.counts(1, 1) == 2);
    CHECK(t.counts(0, 1) == 0);
    CHECK(t.counts(1, 0) == 0);

    const auto u = contingency(ClusterAssignment({0, 0, 0, 0}, 1), labels_of({0, 1, 0, 1}));
    REQUIRE(u.counts.rows() == 1);
    CHECK(u.counts(0, 0) == 2);
    CHECK(u.counts(0, 1) == 2);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_partition(37, 4, rng);
        const auto b = random_partition(37, 3, rng);
        CHECK(contingency(a, b).counts.sum() == 37);
    }
    CHECK_THROWS_AS(contingency(labels_of({0, 1}), labels_of({0})), UsageError);
}

TEST_CASE("hungarian on small instances") {
    Matrix ident = Matrix::Ones(4, 4) - Matrix::Identity(4, 4);
    const auto m = hungarian(ident);
    CHECK(m.cost == 0.0);
    for (int i = 0; i < 4; ++i) CHECK(m.mapping[static_cast<std::size_t>(i)] == i);

    Matrix c(3, 3);
    c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
    // Enumerating the 6 permutations gives 1 + 2 + 2 = 5 (rows 0->1, 1->0, 2->2).
    CHECK(testing::brute_force_assignment(c) == doctest::Approx(5.0));
    CHECK(hungarian(c).cost == doctest::Approx(5.0));

    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(hungarian(bad), UsageError);
}

TEST_CASE("hungarian matches permutation enumeration") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 1 + trial % 7;
        Matrix c(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) c(i, j) = unif(rng);
        const auto m = hungarian(c);
        CHECK(m.cost == doctest::Approx(testing::brute_force_assignment(c)).epsilon(1e-12));
        std::vector<int> seen(static_cast<std::size_t>(n), 0);
        for (int col : m.mapping) ++seen[static_cast<std::size_t>(col)];
        for (int s : seen) CHECK(s == 1);
    }
}

TEST_CASE("hungarian pads rectangular costs") {
    Matrix c(2, 3);
    c << 5, 1, 9, 2, 7, 8;
    const auto m = hungarian(c);
    CHECK(m.cost == doctest::Approx(3.0));
    CHECK(m.mapping[0] == 1);
    CHECK(m.mapping[1] == 0);

    Matrix tall(3, 2);
    tall << 5, 1, 2, 7, 0, 0;
    const auto t = hungarian(tall);
    int unmatched = 0;
    for (int col : t.mapping) unmatched += col < 0;
    CHECK(unmatched == 1);
    CHECK(t.cost == doctest::Approx(1.0));
}

TEST_CASE("accuracy") {
    const auto truth = labels_of({0, 0, 1, 1, 2, 2});
    CHECK(accuracy(truth, truth) == 1.0);
    CHECK(accuracy(labels_of({2, 2, 0, 0, 1, 1}), truth) == 1.0);

    std::vector<int> half(100);
    for (int i = 0; i < 100; ++i) half[static_cast<std::size_t>(i)] = i % 2;
    CHECK(accuracy(ClusterAssignment(std::vector<int>(100, 0), 1),
                   ClusterAssignment(half, 2)) == 0.5);
    CHECK_THROWS_AS(accuracy(labels_of({0}), labels_of({0, 1})), UsageError);
}

TEST_CASE("nmi hand-computed cases") {
    const auto a = labels_of({0, 0, 1, 1});
    CHECK(nmi(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    // Each cell of the 2x2 table holds 1 of 4 samples: p(a,b) = p(a)p(b), MI = 0.
    const auto b = labels_of({0, 1, 0, 1});
    CHECK(mutual_information(a, b) == 0.0);
    CHECK(nmi(a, b) == 0.0);
    CHECK(accuracy(a, b) == 0.5);
    CHECK(nmi(ClusterAssignment({0, 0, 0, 0}, 1), b) == 0.0);
    CHECK(entropy(a) == doctest::Approx(1.0));
}

TEST_CASE("metric invariants on random partitions") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 10 + trial;
        const auto pred = random_partition(n, 2 + trial % 5, rng);
        const auto truth = random_partition(n, 2 + trial % 4, rng);
        const double acc = accuracy(pred, truth);
        const double mi = nmi(pred, truth);
        CHECK(acc >= 0.0);
        CHECK(acc <= 1.0);
        CHECK(mi >= 0.0);
        CHECK(mi <= 1.0 + 1e-12);
        CHECK(nmi(truth, pred) == mi);
        CHECK(accuracy(relabel(pred, rng), truth) == doctest::Approx(acc).epsilon(1e-15));
        CHECK(accuracy(pred, relabel(truth, rng)) == doctest::Approx(acc).epsilon(1e-15));
        CHECK(nmi(relabel(pred, rng), truth) == doctest::Approx(mi).epsilon(1e-12));

        // Largest single-class agreement is a lower bound.
        const auto t = contingency(pred, truth);
        CHECK(acc * n >= static_cast<double>(t.counts.maxCoeff()) - 1e-9);
    }
}
