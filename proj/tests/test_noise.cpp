#include <gtest/gtest.h>

#include <random>

#include "entforge/gates.hpp"
#include "entforge/noise.hpp"
#include "support.hpp"

using namespace entforge;

namespace {

oracle::Dense kraus_damp(const oracle::Dense &rho, int n, int wire, double g) {
    oracle::Dense k0 = oracle::Dense::Zero(2, 2), k1 = oracle::Dense::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - g);
    k1(0, 1) = std::sqrt(g);
    const oracle::Dense e0 = oracle::embed1(k0, n, wire), e1 = oracle::embed1(k1, n, wire);
    return e0 * rho * e0.adjoint() + e1 * rho * e1.adjoint();
}

oracle::Dense kraus_dephase(const oracle::Dense &rho, int n, int wire, double p) {
    oracle::Dense z = oracle::Dense::Zero(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    const oracle::Dense e = oracle::embed1(z, n, wire);
    return (1.0 - p) * rho + p * e * rho * e;
}

DensityMatrix plus_state() {
    const double s = 1.0 / std::sqrt(2.0);
    return to_density(StateVector(1, {s, s}));
}

}  // namespace

TEST(Dephase, Examples) {
    const DensityMatrix plus = plus_state();
    const DensityMatrix same = dephase(plus, 0.0, 0);
    for (Index i = 0; i < 4; ++i) EXPECT_EQ(same.entries()[i], plus.entries()[i]);
    const DensityMatrix full = dephase(plus, 0.5, 0);
    EXPECT_NEAR(std::abs(full(0, 1)), 0.0, 1e-15);
    EXPECT_NEAR(full(0, 0).real(), 0.5, 1e-15);
    const DensityMatrix part = dephase(plus, 0.1, 0);
    EXPECT_NEAR(part(0, 1).real(), 0.4, 1e-15);
    EXPECT_NEAR(part(1, 0).real(), 0.4, 1e-15);
    EXPECT_THROW(dephase(plus, 1.5, 0), ConfigError);
    EXPECT_THROW(dephase(plus, -0.1, 0), ConfigError);
    EXPECT_THROW(dephase(plus, 0.1, 1), ConfigError);
}

TEST(AmplitudeDamp, Examples) {
    const DensityMatrix one = to_density(StateVector(1, {0.0, 1.0}));
    const DensityMatrix same = amplitude_damp(one, 0.0, 0);
    EXPECT_EQ(same(1, 1), cplx(1.0));
    const DensityMatrix gone = amplitude_damp(one, 1.0, 0);
    EXPECT_EQ(gone(0, 0), cplx(1.0));
    EXPECT_EQ(gone(1, 1), cplx(0.0));
    const DensityMatrix weak = amplitude_damp(one, 0.01, 0);
    EXPECT_NEAR(weak(0, 0).real(), 0.01, 1e-15);
    EXPECT_NEAR(weak(1, 1).real(), 0.99, 1e-15);
    EXPECT_THROW(amplitude_damp(one, 1.01, 0), ConfigError);
}

TEST(Channels, MatchKrausOracle) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + trial % 3;
        const int w = trial % n;
        const double p = u(rng), g = u(rng);
        const oracle::Dense rho = oracle::random_density(n, rng);
        const auto d = dephase(support::density(n, rho), p, w);
        ASSERT_LT(support::max_abs_diff(support::dense(d), kraus_dephase(rho, n, w, p)), 1e-14);
        const auto a = amplitude_damp(support::density(n, rho), g, w);
        ASSERT_LT(support::max_abs_diff(support::dense(a), kraus_damp(rho, n, w, g)), 1e-14);
    }
}

TEST(Channels, TraceHermiticityPositivity) {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const oracle::Dense rho = oracle::random_density(3, rng);
        const int w = trial % 3;
        for (const DensityMatrix &out : {dephase(support::density(3, rho), u(rng), w),
                                         amplitude_damp(support::density(3, rho), u(rng), w)}) {
            ASSERT_NEAR(std::abs(out.trace() - 1.0), 0.0, 1e-12);
            const oracle::Dense m = support::dense(out);
            ASSERT_LT(support::max_abs_diff(m, m.adjoint()), 1e-15);
            ASSERT_GE(oracle::eigenvalues(m).minCoeff(), -1e-9);
        }
    }
}

TEST(Channels, FullDephasingIsIdempotent) {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho = support::density(2, oracle::random_density(2, rng));
        const auto once = dephase(rho, 0.5, 1);
        const auto twice = dephase(once, 0.5, 1);
        ASSERT_LT(support::max_abs_diff(support::dense(once), support::dense(twice)), 1e-12);
    }
}

TEST(Channels, CommuteWithDisjointUnitaries) {
    std::mt19937_64 rng(109);
    for (int trial = 0; trial < 30; ++trial) {
        const DensityMatrix rho = support::density(3, oracle::random_density(3, rng));
        const Mat4 u = oracle::to_mat4(oracle::random_unitary(4, rng));
        DensityMatrix a = amplitude_damp(dephase(rho, 0.2, 0), 0.3, 0);
        apply_unitary(a, u, 1, 2);
        DensityMatrix b = rho;
        apply_unitary(b, u, 1, 2);
        b = amplitude_damp(dephase(b, 0.2, 0), 0.3, 0);
        ASSERT_LT(support::max_abs_diff(support::dense(a), support::dense(b)), 1e-10);
    }
}

TEST(NoiseModel, Validation) {
    EXPECT_NO_THROW(NoiseModel::dephasing_and_damping(0.01, 0.01).validate());
    EXPECT_THROW(NoiseModel::damping_only(2.0).validate(), ConfigError);
    EXPECT_THROW(NoiseModel::dephasing_only(-0.5).validate(), ConfigError);
    const NoiseModel d;
    EXPECT_DOUBLE_EQ(d.dephase_p, 0.01);
    EXPECT_DOUBLE_EQ(d.damping_gamma, 0.01);
}
