#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "entforge/measures.hpp"
#include "support.hpp"

using namespace entforge;

namespace {

Eigen::VectorXcd w3() {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
    v(1) = v(2) = v(4) = 1.0 / std::sqrt(3.0);
    return v;
}

Eigen::VectorXcd product_state(int n, std::mt19937_64 &rng) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
    for (int q = 0; q < n; ++q) {
        const Eigen::VectorXcd one = oracle::random_state(1, rng);
        Eigen::VectorXcd next(v.size() * 2);
        for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(2 * i, 2) = v(i) * one;
        v = next;
    }
    return v;
}

// Relabel qubits: qubit q of the input becomes qubit perm[q].
Eigen::VectorXcd permute_qubits(const Eigen::VectorXcd &v, int n, const std::vector<int> &perm) {
    Eigen::VectorXcd out(v.size());
    for (int i = 0; i < (1 << n); ++i) {
        int j = 0;
        for (int q = 0; q < n; ++q)
            if ((i >> (n - 1 - q)) & 1) j |= 1 << (n - 1 - perm[q]);
        out(j) = v(i);
    }
    return out;
}

std::vector<int> random_side(int n, std::mt19937_64 &rng) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(n - 1));
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace

TEST(MeyerWallach, GhzIsOne) {
    for (int n = 2; n <= 10; ++n) {
        EXPECT_NEAR(meyer_wallach(support::state(n, support::ghz(n))), 1.0, 1e-14) << n;
        if (n <= 6) {
            EXPECT_NEAR(meyer_wallach(support::density(n, support::projector(support::ghz(n)))), 1.0, 1e-14);
        }
    }
}

TEST(MeyerWallach, ProductIsZero) {
    std::mt19937_64 rng(41);
    for (int n = 2; n <= 6; ++n) {
        EXPECT_NEAR(meyer_wallach(zero_state(n)), 0.0, 1e-15);
        EXPECT_NEAR(meyer_wallach(support::state(n, product_state(n, rng))), 0.0, 1e-13);
    }
}

TEST(MeyerWallach, WStateIsEightNinths) {
    EXPECT_NEAR(meyer_wallach(support::state(3, w3())), 8.0 / 9.0, 1e-14);
    EXPECT_NEAR(meyer_wallach(support::density(3, support::projector(w3()))), 8.0 / 9.0, 1e-14);
}

TEST(MeyerWallach, RejectsSingleQubit) {
    EXPECT_THROW(meyer_wallach(zero_state(1)), ConfigError);
    EXPECT_THROW(meyer_wallach(to_density(zero_state(1))), ConfigError);
}

TEST(MeyerWallach, MatchesOracleAndStaysInRange) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 4;
        const auto v = oracle::random_state(n, rng);
        const double pure = meyer_wallach(support::state(n, v));
        const double via_rho = meyer_wallach(support::density(n, support::projector(v)));
        ASSERT_NEAR(pure, via_rho, 1e-10);
        ASSERT_NEAR(pure, oracle::meyer_wallach(support::projector(v), n), 1e-12);
        ASSERT_GE(pure, -1e-12);
        ASSERT_LE(pure, 1.0 + 1e-12);
        const auto mixed = oracle::random_density(n, rng);
        ASSERT_NEAR(meyer_wallach(support::density(n, mixed)), oracle::meyer_wallach(mixed, n), 1e-12);
    }
}

TEST(MeyerWallach, PermutationInvariant) {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 5;
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto v = oracle::random_state(n, rng);
        ASSERT_NEAR(meyer_wallach(support::state(n, v)), meyer_wallach(support::state(n, permute_qubits(v, n, perm))),
                    1e-12);
    }
}

TEST(Negativity, Examples) {
    const Eigen::VectorXcd bell = support::ghz(2);
    EXPECT_NEAR(negativity(support::density(2, support::projector(bell)), Bipartition{1}), 0.5, 1e-14);
    EXPECT_NEAR(negativity(support::state(2, bell), Bipartition{1}), 0.5, 1e-14);
    const DensityMatrix zero = to_density(zero_state(3));
    for (const Bipartition &b : {Bipartition{0}, Bipartition{1}, Bipartition{0, 2}})
        EXPECT_NEAR(negativity(zero, b), 0.0, 1e-14);
    const Eigen::VectorXcd g5 = support::ghz(5);
    const double oracle_value = oracle::negativity(support::projector(g5), 5, {0, 1, 2});
    EXPECT_NEAR(oracle_value, 0.5, 1e-12);
    EXPECT_NEAR(negativity(support::density(5, support::projector(g5)), Bipartition{0, 1, 2}), 0.5, 1e-12);
    EXPECT_NEAR(negativity(support::state(5, g5), Bipartition{0, 1, 2}), 0.5, 1e-12);
}

TEST(Negativity, InvalidBipartitions) {
    const DensityMatrix rho = to_density(zero_state(3));
    EXPECT_THROW(negativity(rho, Bipartition{3}), ConfigError);
    EXPECT_THROW(negativity(rho, Bipartition{0, 1, 2}), ConfigError);
    EXPECT_THROW(negativity(zero_state(3), Bipartition{5}), ConfigError);
    EXPECT_THROW(Bipartition({1, 1}), ConfigError);
    EXPECT_THROW(Bipartition(std::vector<int>{}), ConfigError);
}

TEST(Negativity, MatchesEigenOracle) {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 4;
        const auto side = random_side(n, rng);
        const Bipartition b(side);
        const auto rho = oracle::random_density(n, rng);
        ASSERT_NEAR(negativity(support::density(n, rho), b), oracle::negativity(rho, n, side), 1e-10);
        const auto v = oracle::random_state(n, rng);
        const double expect = oracle::negativity(support::projector(v), n, side);
        ASSERT_NEAR(negativity(support::state(n, v), b), expect, 1e-10);
        ASSERT_NEAR(negativity(support::density(n, support::projector(v)), b), expect, 1e-10);
        ASSERT_GE(negativity(support::density(n, rho), b), -1e-10);
        ASSERT_LE(expect, negativity_upper_bound(n, b) + 1e-9);
    }
}

TEST(Negativity, ProductAcrossCutIsZero) {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = oracle::random_density(2, rng);
        const auto c = oracle::random_density(2, rng);
        EXPECT_NEAR(negativity(support::density(4, oracle::kron(a, c)), Bipartition{2, 3}), 0.0, 1e-10);
    }
}

TEST(Negativity, LocalUnitaryInvariance) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 2 + trial % 3;
        const int split = 1 + static_cast<int>(rng() % static_cast<unsigned>(n - 1));
        std::vector<int> side_b;
        for (int q = split; q < n; ++q) side_b.push_back(q);
        const oracle::Dense u = oracle::kron(oracle::random_unitary(1 << split, rng),
                                             oracle::random_unitary(1 << (n - split), rng));
        const auto rho = oracle::random_density(n, rng);
        const Bipartition b(side_b);
        const double before = negativity(support::density(n, rho), b);
        const double after = negativity(support::density(n, u * rho * u.adjoint()), b);
        ASSERT_NEAR(before, after, 1e-9);
    }
}

TEST(Negativity, ComplementSymmetry) {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 4;
        const Bipartition b(random_side(n, rng));
        const auto rho = support::density(n, oracle::random_density(n, rng));
        ASSERT_NEAR(negativity(rho, b), negativity(rho, b.complement(n)), 1e-10);
        const auto psi = support::state(n, oracle::random_state(n, rng));
        ASSERT_NEAR(negativity(psi, b), negativity(psi, b.complement(n)), 1e-10);
    }
}

TEST(NegativityUpperBound, Examples) {
    EXPECT_EQ(negativity_upper_bound(5, Bipartition{0, 1, 2}), 1.5);
    EXPECT_EQ(negativity_upper_bound(10, Bipartition{0, 1, 2, 3, 4}), 15.5);
    EXPECT_EQ(negativity_upper_bound(2, Bipartition{0}), 0.5);
    EXPECT_EQ(negativity_upper_bound(5, Bipartition{2, 3, 4}), 1.5);
    EXPECT_EQ(negativity_upper_bound(6, Bipartition{0}), 0.5);
    EXPECT_THROW(negativity_upper_bound(3, Bipartition{0, 1, 2}), ConfigError);
}

TEST(NegativityUpperBound, AttainedByMaximallyEntangledPairs) {
    // Bell pairs (0,3), (1,4): B = {3,4} vs {0,1,2} has Schmidt rank 4.
    const Eigen::VectorXcd bell = support::ghz(2);
    Eigen::VectorXcd v = oracle::kron(oracle::kron(bell, bell), support::basis(1, 0));
    v = permute_qubits(v, 5, {0, 3, 1, 4, 2});
    const double n = negativity(support::state(5, v), Bipartition{3, 4});
    EXPECT_NEAR(n, 1.5, 1e-12);
    EXPECT_NEAR(n, negativity_upper_bound(5, Bipartition{3, 4}), 1e-12);
}

TEST(MeasureReport, CollectsAll) {
    const State s = support::state(5, support::ghz(5));
    const auto r = measure_report(s, {Bipartition{0, 1, 2}, Bipartition{2, 3, 4}});
    EXPECT_NEAR(r.mw, 1.0, 1e-14);
    ASSERT_EQ(r.negativities.size(), 2u);
    EXPECT_NEAR(r.negativities[1].second, 0.5, 1e-12);
    EXPECT_EQ(r.bounds[0].second, 1.5);
    EXPECT_EQ(r.negativities[0].first, (Bipartition{0, 1, 2}));
}
